#pragma once

#include "scq/film.hpp"
#include "scq/junction.hpp"
#include "scq/rcsj.hpp"
#include "scq/resonator.hpp"
#include "scq/trace.hpp"
#include "scq/units.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scq::io {

enum class TraceKind { Rt, Iv, S21, Decay, Ramsey, Areas, QiPower, QiTemp, Anneal, Exposure };

[[nodiscard]] std::string_view to_string(TraceKind kind);
/// Throws SchemaError for names outside the known set.
[[nodiscard]] TraceKind trace_kind_from_string(std::string_view name);

struct ColumnSpec {
    std::string_view name;
    units::Dimension dimension;
    bool required = true;
};

[[nodiscard]] const std::vector<ColumnSpec>& schema(TraceKind kind);

/// A parsed measurement file. Column data is stored in SI units under the
/// canonical quantity names of the kind's schema.
///
/// On disk: `# key: value` header lines (must include `kind` unless the
/// caller supplies it), one comma-separated row of column names, then
/// numeric rows. A column is named either `<quantity>_<unit>` or just
/// `<quantity>`, in which case a `<quantity>_unit` header key may give the
/// unit; otherwise SI is assumed.
struct TraceFile {
    TraceKind kind = TraceKind::Rt;
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;

    [[nodiscard]] std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
    [[nodiscard]] bool has_column(std::string_view name) const;
    /// Throws SchemaError naming the column when absent.
    [[nodiscard]] const std::vector<double>& column(std::string_view name) const;
    [[nodiscard]] std::optional<std::string> header_value(std::string_view key) const;
    /// Header entry parsed as "<number> [unit]" and converted to SI; a
    /// separate `<key>_unit` entry is honoured as well.
    [[nodiscard]] std::optional<double> quantity(std::string_view key, units::Dimension d) const;
    void set_header(std::string key, std::string value);

    bool operator==(const TraceFile&) const = default;
};

/// Parses file contents. `source` is only used in error messages.
[[nodiscard]] TraceFile parse_trace(std::string_view text, std::optional<TraceKind> expected = std::nullopt,
                                    std::string_view source = "<memory>");

/// Reads and parses a file; fails when the declared kind differs from `expected`.
[[nodiscard]] TraceFile ingest(const std::filesystem::path& path, std::optional<TraceKind> expected = std::nullopt);

/// SI rendering with 17 significant digits; unit header keys are dropped
/// because the values are already converted.
[[nodiscard]] std::string serialize(const TraceFile& trace);

void write_trace(const std::filesystem::path& path, const TraceFile& trace);

/// Builds a file from SI columns given in schema order (optional columns may be omitted).
[[nodiscard]] TraceFile make_trace(TraceKind kind, std::vector<std::pair<std::string, std::vector<double>>> columns,
                                   std::vector<std::pair<std::string, std::string>> header = {});

// Typed views; each checks that the file is of the matching kind.
[[nodiscard]] film::RtTrace to_rt_trace(const TraceFile& file);
[[nodiscard]] ComplexTrace to_s21_trace(const TraceFile& file);
[[nodiscard]] Trace to_decay_trace(const TraceFile& file);
[[nodiscard]] std::vector<junction::AreaSample> to_area_samples(const TraceFile& file);
[[nodiscard]] std::vector<resonator::QiPoint> to_qi_points(const TraceFile& file);
[[nodiscard]] std::vector<junction::AnnealPoint> to_anneal_points(const TraceFile& file);
[[nodiscard]] std::vector<junction::ExposurePoint> to_exposure_points(const TraceFile& file);
/// Splits by the optional `sweep` column (0 up, 1 down); without it the
/// rows up to the largest current form the up-sweep.
[[nodiscard]] std::pair<rcsj::IvTrace, rcsj::IvTrace> to_iv_traces(const TraceFile& file);

} // namespace scq::io
