#pragma once

#include <optional>
#include <string>

#include "swingbench/oracles.hpp"
#include "swingbench/sweeps.hpp"

namespace swingbench {

/// 17 significant digits; round-trips doubles exactly and is byte-stable.
std::string format_number(double value);

/// Write content to path via a temp file + rename so readers never observe a
/// partial file.
void atomic_write_file(const std::string& path, const std::string& content);

// Fixed CSV column contracts (stable for downstream plotting scripts):
//   bode:      omega,sigma_max
//   rootlocus: M,mode,re1,im1,re2,im2
//   sweep:     param,value,h2_closed,h2_oracle,hinf_closed,hinf_oracle,regime
//   combined:  M,h2_oracle,hinf_oracle
// Missing metrics serialize as empty cells.
std::string to_csv(const BodeTable<double>& table);
std::string to_csv(const RootLocusTable<double>& table);
std::string to_csv(const SweepTable<double>& table);
std::string to_csv(const std::vector<CombinedRow<double>>& rows);

}  // namespace swingbench
