#pragma once

#include <string>
#include <vector>

namespace manial {

/// One row per outer iteration of a solver run. oracle_calls counts
/// first-order oracle evaluations of the smooth term (batch evaluations for
/// stochastic runs); prox and retraction calls are tallied separately.
struct TraceRecord {
  long k = 0;
  long oracle_calls = 0;
  double wall_seconds = 0.0;
  double objective = 0.0;
  double eta_p = 0.0;
  double eta_d = 0.0;
  double eta_c = 0.0;
  double sigma = 0.0;
  double beta = 0.0;
  double z_norm = 0.0;
  long inner_iters = 0;
  std::string flags;  // semicolon-separated markers, no commas
  long prox_calls = 0;
  long retraction_calls = 0;
};

/// Exact CSV header emitted and expected by the trace readers.
extern const char* const kTraceCsvHeader;

/// Writes rows under the fixed header. With include_timing = false the
/// wall_seconds column is written as 0 so reruns are byte-identical.
void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& rows,
                     bool include_timing = true);

/// Parses a trace written by write_trace_csv. Throws std::runtime_error
/// with a line number on malformed input.
std::vector<TraceRecord> read_trace_csv(const std::string& path);

}  // namespace manial
