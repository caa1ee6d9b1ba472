#include "bdlab/cycle_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "bdlab/errors.hpp"
#include "json.hpp"

namespace bdlab {

namespace {

constexpr char kMagic[8] = {'B', 'D', 'L', 'C', 'Y', 'C', '1', '\n'};

const char* topology_name(CycleTopology t) {
  return t == CycleTopology::cycle ? "cycle" : "line";
}

const char* kind_name(CycleKind k) {
  switch (k) {
    case CycleKind::disk_free: return "disk_free";
    case CycleKind::disk_boundary: return "disk_boundary";
    case CycleKind::halfplane_bm: return "halfplane_bm";
    case CycleKind::halfplane_bessel: return "halfplane_bessel";
  }
  return "disk_free";
}

CycleKind kind_from(const std::string& s) {
  if (s == "disk_free") return CycleKind::disk_free;
  if (s == "disk_boundary") return CycleKind::disk_boundary;
  if (s == "halfplane_bm") return CycleKind::halfplane_bm;
  if (s == "halfplane_bessel") return CycleKind::halfplane_bessel;
  throw IoError("cycle file: unknown kind '" + s + "'");
}

#pragma pack(push, 1)
struct SiteRecord {
  double label;
  double weight;
  double base_coord;
  std::int64_t tree_id;
  std::uint8_t is_boundary;
};
#pragma pack(pop)

}  // namespace

void save_cycle(const LabeledCycle& cycle, const std::string& path) {
  nlohmann::json header = {
      {"topology", topology_name(cycle.topology)},
      {"kind", kind_name(cycle.kind)},
      {"base_length", cycle.base_length},
      {"sigma_min", cycle.sigma_min},
      {"site_count", cycle.sites.size()},
  };
  const std::string hs = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t hlen = hs.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const auto& s : cycle.sites) {
    SiteRecord rec{s.label, s.weight, s.base_coord, s.tree_id,
                   static_cast<std::uint8_t>(s.is_boundary ? 1 : 0)};
    out.write(reinterpret_cast<const char*>(&rec), sizeof(rec));
  }
  if (!out) throw IoError("write failed: " + path);
}

LabeledCycle load_cycle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("not a cycle file: " + path);
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  if (!in || hlen > (1u << 20)) throw IoError("corrupt cycle header: " + path);
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad cycle header in " + path + ": " + e.what());
  }
  LabeledCycle cycle;
  cycle.topology = header.at("topology").get<std::string>() == "cycle"
                       ? CycleTopology::cycle
                       : CycleTopology::line;
  cycle.kind = kind_from(header.at("kind").get<std::string>());
  cycle.base_length = header.at("base_length").get<double>();
  cycle.sigma_min = header.at("sigma_min").get<double>();
  const auto count = header.at("site_count").get<std::uint64_t>();
  cycle.sites.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    SiteRecord rec;
    in.read(reinterpret_cast<char*>(&rec), sizeof(rec));
    if (!in) throw IoError("truncated cycle file: " + path);
    Site s;
    s.label = rec.label;
    s.weight = rec.weight;
    s.base_coord = rec.base_coord;
    s.tree_id = rec.tree_id;
    s.is_boundary = rec.is_boundary != 0;
    cycle.sites.push_back(s);
  }
  return cycle;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    out << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_full(row[i]);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace bdlab
