#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capmimo/experiments.hpp"

namespace capmimo {

inline constexpr std::string_view kSweepCsvHeader =
    "scenario,d_m,m1,m2,ref_m,mi_nats,mi_bits,mi_ref_nats,abs_gap,n_used,model_tag,wall_time_s";

struct CsvOptions {
    // Wall times differ between runs; leaving them out keeps reruns byte-identical.
    bool timing = false;
};

/// Shortest decimal text that parses back to the same double ("nan"/"inf" for non-finite).
std::string format_double(double value);

/// RFC 4180 quoting: fields holding a comma, quote or line break are quoted.
std::string csv_escape(std::string_view field);

/// Splits one CSV record, undoing csv_escape. Throws std::invalid_argument on
/// an unterminated quote.
std::vector<std::string> split_csv_record(std::string_view line);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, const CsvOptions& opts = {});

/// Parses what write_sweep_csv produced. Failed cells carry model_tag
/// "error:<tag>"; their message lives in the run's .meta file, so `error`
/// comes back as "failed". Throws std::invalid_argument on malformed input.
std::vector<SweepRow> read_sweep_csv(std::istream& in);

}  // namespace capmimo
