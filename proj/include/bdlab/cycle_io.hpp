#pragma once

#include <string>
#include <vector>

#include "bdlab/snake.hpp"

namespace bdlab {

// Binary cycle file: magic, JSON header (topology, kind, base_length,
// sigma_min, site count), then fixed-width little-endian site records.
void save_cycle(const LabeledCycle& cycle, const std::string& path);
LabeledCycle load_cycle(const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// 17-significant-digit decimal formatting; round-trips doubles exactly.
std::string format_full(double v);

void emit_csv(const CsvTable& table, const std::string& path);

}  // namespace bdlab
