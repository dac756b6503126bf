#ifndef SRRR_IO_HPP
#define SRRR_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "srrr/evalsim.hpp"
#include "srrr/model.hpp"
#include "srrr/types.hpp"

// File formats. Doubles are written with 17 significant digits everywhere so
// every value round-trips bit-exactly through its decimal form. Wall-time
// fields are zeroed unless `include_timing` is set: timing is the one
// non-reproducible quantity, and byte-identical re-runs are part of the
// output contract.

namespace srrr {
namespace io {

using json = nlohmann::ordered_json;

/// Shortest 17-significant-digit decimal form of v ("%.17g").
std::string format_double(double v);

/// Matrix CSV: a "ncols=<n>" header line, then one comma-separated line per row.
void write_matrix_csv(const std::filesystem::path& path, const Mat& m);
Mat read_matrix_csv(const std::filesystem::path& path);

json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j);

/// Dataset container: {"X": [[...]], "Y": [[...]]}.
void write_dataset_json(const std::filesystem::path& path, const Dataset& d);
Dataset read_dataset_json(const std::filesystem::path& path);

json fit_result_to_json(const FitResult& r, bool include_timing);
void write_fit_result_json(const std::filesystem::path& path, const FitResult& r,
                           bool include_timing);

/// Trace CSV with columns iter,objective,seconds.
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceEntry>& trace,
                     bool include_timing);

/// Monte-Carlo trials CSV with columns trial,arm,angle,iters,seconds,recall,precision.
/// Failed fits carry nan in the numeric columns.
void write_trials_csv(const std::filesystem::path& path, const McTable& table,
                      bool include_timing);

/// Per-arm summary JSON; `meta` entries are merged in at the top level.
json summary_to_json(const McTable& table, bool include_timing, const json& meta);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

} // namespace io
} // namespace srrr

#endif
