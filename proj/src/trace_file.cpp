#include "scq/trace_file.hpp"

#include "scq/digest.hpp"
#include "scq/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>

namespace scq::io {

namespace {

using units::Dimension;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string where(std::string_view source, std::size_t line) {
    return std::string(source) + ":" + std::to_string(line) + ": ";
}

struct Resolved {
    const ColumnSpec* spec = nullptr;
    std::string unit;
};

Resolved resolve_column(std::string_view name, const std::vector<ColumnSpec>& cols) {
    for (const auto& c : cols) {
        if (c.name == name) return {&c, {}};
    }
    for (const auto& c : cols) {
        if (name.size() > c.name.size() + 1 && name.starts_with(c.name) && name[c.name.size()] == '_') {
            const std::string_view suffix = name.substr(c.name.size() + 1);
            if (units::is_unit_of(suffix, c.dimension)) return {&c, std::string(suffix)};
        }
    }
    return {};
}

void require_kind(const TraceFile& f, TraceKind k) {
    if (f.kind != k) {
        throw SchemaError("expected a '" + std::string(to_string(k)) + "' trace, got '" +
                          std::string(to_string(f.kind)) + "'");
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string_view to_string(TraceKind kind) {
    switch (kind) {
    case TraceKind::Rt: return "rt";
    case TraceKind::Iv: return "iv";
    case TraceKind::S21: return "s21";
    case TraceKind::Decay: return "decay";
    case TraceKind::Ramsey: return "ramsey";
    case TraceKind::Areas: return "areas";
    case TraceKind::QiPower: return "qi_power";
    case TraceKind::QiTemp: return "qi_temp";
    case TraceKind::Anneal: return "anneal";
    case TraceKind::Exposure: return "exposure";
    }
    return "unknown";
}

TraceKind trace_kind_from_string(std::string_view name) {
    static const std::map<std::string_view, TraceKind> kinds = {
        {"rt", TraceKind::Rt},         {"iv", TraceKind::Iv},
        {"s21", TraceKind::S21},       {"decay", TraceKind::Decay},
        {"ramsey", TraceKind::Ramsey}, {"areas", TraceKind::Areas},
        {"qi_power", TraceKind::QiPower}, {"qi_temp", TraceKind::QiTemp},
        {"anneal", TraceKind::Anneal}, {"exposure", TraceKind::Exposure},
    };
    const auto it = kinds.find(name);
    if (it == kinds.end()) throw SchemaError("unknown trace kind '" + std::string(name) + "'");
    return it->second;
}

const std::vector<ColumnSpec>& schema(TraceKind kind) {
    static const std::map<TraceKind, std::vector<ColumnSpec>> table = {
        {TraceKind::Rt, {{"temperature", Dimension::Temperature}, {"resistance", Dimension::Resistance}}},
        {TraceKind::Iv,
         {{"current", Dimension::Current}, {"voltage", Dimension::Voltage}, {"sweep", Dimension::Dimensionless, false}}},
        {TraceKind::S21,
         {{"frequency", Dimension::Frequency}, {"re_s21", Dimension::Dimensionless}, {"im_s21", Dimension::Dimensionless}}},
        {TraceKind::Decay, {{"delay", Dimension::Time}, {"population", Dimension::Dimensionless}}},
        {TraceKind::Ramsey, {{"delay", Dimension::Time}, {"population", Dimension::Dimensionless}}},
        {TraceKind::Areas,
         {{"width", Dimension::Length}, {"height", Dimension::Length}, {"resistance", Dimension::Resistance}}},
        {TraceKind::QiPower, {{"photon_number", Dimension::Dimensionless}, {"q_internal", Dimension::Dimensionless}}},
        {TraceKind::QiTemp, {{"temperature", Dimension::Temperature}, {"q_internal", Dimension::Dimensionless}}},
        {TraceKind::Anneal, {{"time", Dimension::Time}, {"jc_ratio", Dimension::Dimensionless}}},
        {TraceKind::Exposure, {{"exposure", Dimension::Exposure}, {"jc", Dimension::CurrentDensity}}},
    };
    return table.at(kind);
}

bool TraceFile::has_column(std::string_view name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

const std::vector<double>& TraceFile::column(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw SchemaError("missing column '" + std::string(name) + "'");
    return data[static_cast<std::size_t>(it - columns.begin())];
}

std::optional<std::string> TraceFile::header_value(std::string_view key) const {
    for (const auto& [k, v] : header) {
        if (k == key) return v;
    }
    return std::nullopt;
}

std::optional<double> TraceFile::quantity(std::string_view key, units::Dimension d) const {
    const auto v = header_value(key);
    if (!v) return std::nullopt;
    try {
        const double q = units::parse_quantity(*v, d);
        if (const auto u = header_value(std::string(key) + "_unit")) return units::to_si(q, *u, d);
        return q;
    } catch (const SchemaError& e) {
        throw SchemaError("header '" + std::string(key) + "': " + e.what());
    }
}

void TraceFile::set_header(std::string key, std::string value) {
    for (auto& [k, v] : header) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    header.emplace_back(std::move(key), std::move(value));
}

TraceFile parse_trace(std::string_view text, std::optional<TraceKind> expected, std::string_view source) {
    TraceFile out;
    std::optional<TraceKind> declared;
    std::vector<std::pair<std::string, std::size_t>> raw_columns;
    std::vector<Resolved> resolved;
    bool have_columns = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    std::vector<std::vector<std::pair<double, std::size_t>>> cells;

    while (pos <= text.size()) {
        const std::size_t end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '#') {
            if (have_columns) throw SchemaError(where(source, line_no) + "header line after the column row");
            const std::string_view body = trim(line.substr(1));
            const std::size_t colon = body.find(':');
            if (colon == std::string_view::npos) continue; // free comment
            const std::string key(trim(body.substr(0, colon)));
            const std::string value(trim(body.substr(colon + 1)));
            if (key == "kind") {
                try {
                    declared = trace_kind_from_string(value);
                } catch (const SchemaError& e) {
                    throw SchemaError(where(source, line_no) + e.what());
                }
            } else {
                out.set_header(key, value);
            }
            continue;
        }

        if (!have_columns) {
            if (!declared && !expected) throw SchemaError(where(source, line_no) + "no 'kind' declared in the header");
            if (declared && expected && *declared != *expected) {
                throw SchemaError(std::string(source) + ": declared kind '" + std::string(to_string(*declared)) +
                                  "' but '" + std::string(to_string(*expected)) + "' was expected");
            }
            out.kind = declared ? *declared : *expected;
            const auto& spec = schema(out.kind);
            for (const auto name : split(line, ',')) {
                Resolved r = resolve_column(name, spec);
                if (r.spec == nullptr) {
                    throw SchemaError(where(source, line_no) + "unexpected column '" + std::string(name) + "' for kind " +
                                      std::string(to_string(out.kind)));
                }
                for (const auto& prev : resolved) {
                    if (prev.spec == r.spec) {
                        throw SchemaError(where(source, line_no) + "duplicate column '" + std::string(r.spec->name) + "'");
                    }
                }
                if (r.unit.empty()) {
                    if (const auto u = out.header_value(std::string(r.spec->name) + "_unit")) r.unit = *u;
                }
                if (!units::is_unit_of(r.unit, r.spec->dimension)) {
                    throw SchemaError(where(source, line_no) + "unit '" + r.unit + "' not recognized for column '" +
                                      std::string(r.spec->name) + "'");
                }
                resolved.push_back(std::move(r));
            }
            for (const auto& c : spec) {
                if (!c.required) continue;
                const bool present = std::any_of(resolved.begin(), resolved.end(),
                                                 [&](const Resolved& r) { return r.spec->name == c.name; });
                if (!present) {
                    throw SchemaError(std::string(source) + ": missing required column '" + std::string(c.name) +
                                      "' for kind " + std::string(to_string(out.kind)));
                }
            }
            cells.resize(resolved.size());
            have_columns = true;
            continue;
        }

        const auto fields = split(line, ',');
        if (fields.size() != resolved.size()) {
            throw SchemaError(where(source, line_no) + "expected " + std::to_string(resolved.size()) + " cells, found " +
                              std::to_string(fields.size()));
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            double v = 0.0;
            const auto f = fields[i];
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
                throw SchemaError(where(source, line_no) + "non-numeric cell '" + std::string(f) + "' in column '" +
                                  std::string(resolved[i].spec->name) + "'");
            }
            cells[i].emplace_back(v, line_no);
        }
    }
    if (!have_columns) throw SchemaError(std::string(source) + ": no column row found");

    // Store columns in schema order with SI values.
    for (const auto& c : schema(out.kind)) {
        for (std::size_t i = 0; i < resolved.size(); ++i) {
            if (resolved[i].spec->name != c.name) continue;
            std::vector<double> col;
            col.reserve(cells[i].size());
            for (const auto& [v, ln] : cells[i]) {
                try {
                    col.push_back(units::to_si(v, resolved[i].unit, c.dimension));
                } catch (const SchemaError& e) {
                    throw SchemaError(where(source, ln) + e.what());
                }
            }
            out.columns.emplace_back(c.name);
            out.data.push_back(std::move(col));
            std::erase_if(out.header, [&](const auto& kv) { return kv.first == std::string(c.name) + "_unit"; });
        }
    }
    return out;
}

TraceFile ingest(const std::filesystem::path& path, std::optional<TraceKind> expected) {
    if (!std::filesystem::exists(path)) throw std::runtime_error("input file not found: '" + path.string() + "'");
    return parse_trace(read_file(path), expected, path.string());
}

std::string serialize(const TraceFile& trace) {
    std::string out = "# kind: " + std::string(to_string(trace.kind)) + "\n";
    for (const auto& [k, v] : trace.header) out += "# " + k + ": " + v + "\n";
    const auto& spec = schema(trace.kind);
    for (std::size_t i = 0; i < trace.columns.size(); ++i) {
        if (i) out += ",";
        out += trace.columns[i];
        for (const auto& c : spec) {
            if (c.name == trace.columns[i] && c.dimension != Dimension::Dimensionless) {
                out += "_" + std::string(units::si_unit(c.dimension));
            }
        }
    }
    out += "\n";
    for (std::size_t r = 0; r < trace.rows(); ++r) {
        for (std::size_t i = 0; i < trace.columns.size(); ++i) {
            if (i) out += ",";
            out += format_double(trace.data[i][r]);
        }
        out += "\n";
    }
    return out;
}

void write_trace(const std::filesystem::path& path, const TraceFile& trace) {
    write_file_atomic(path, serialize(trace));
}

TraceFile make_trace(TraceKind kind, std::vector<std::pair<std::string, std::vector<double>>> columns,
                     std::vector<std::pair<std::string, std::string>> header) {
    TraceFile out;
    out.kind = kind;
    out.header = std::move(header);
    std::size_t rows = columns.empty() ? 0 : columns.front().second.size();
    for (const auto& c : schema(kind)) {
        bool found = false;
        for (auto& [name, values] : columns) {
            if (name != c.name) continue;
            if (values.size() != rows) throw SchemaError("column '" + name + "' has a different length");
            out.columns.push_back(name);
            out.data.push_back(std::move(values));
            found = true;
        }
        if (!found && c.required) throw SchemaError("missing required column '" + std::string(c.name) + "'");
    }
    if (out.columns.size() != columns.size()) throw SchemaError("unexpected column for kind " + std::string(to_string(kind)));
    return out;
}

film::RtTrace to_rt_trace(const TraceFile& file) {
    require_kind(file, TraceKind::Rt);
    const auto& t = file.column("temperature");
    const auto& r = file.column("resistance");
    std::vector<film::RtPoint> pts;
    for (std::size_t i = 0; i < t.size(); ++i) pts.push_back({t[i], r[i]});
    std::optional<film::FilmGeometry> geom;
    const auto len = file.quantity("length", Dimension::Length);
    const auto wid = file.quantity("width", Dimension::Length);
    const auto thk = file.quantity("thickness", Dimension::Length);
    if (len && wid && thk) geom = film::FilmGeometry{*len, *wid, *thk};
    return film::RtTrace(std::move(pts), geom);
}

ComplexTrace to_s21_trace(const TraceFile& file) {
    require_kind(file, TraceKind::S21);
    ComplexTrace out;
    out.label = file.header_value("label").value_or("s21");
    out.x_unit = "Hz";
    out.x = file.column("frequency");
    const auto& re = file.column("re_s21");
    const auto& im = file.column("im_s21");
    for (std::size_t i = 0; i < re.size(); ++i) out.y.emplace_back(re[i], im[i]);
    return out;
}

Trace to_decay_trace(const TraceFile& file) {
    if (file.kind != TraceKind::Decay && file.kind != TraceKind::Ramsey) {
        throw SchemaError("expected a 'decay' or 'ramsey' trace, got '" + std::string(to_string(file.kind)) + "'");
    }
    Trace out;
    out.label = file.header_value("label").value_or(std::string(to_string(file.kind)));
    out.x_unit = "s";
    out.y_unit = "1";
    out.x = file.column("delay");
    out.y = file.column("population");
    return out;
}

std::vector<junction::AreaSample> to_area_samples(const TraceFile& file) {
    require_kind(file, TraceKind::Areas);
    const auto& w = file.column("width");
    const auto& h = file.column("height");
    const auto& r = file.column("resistance");
    std::vector<junction::AreaSample> out;
    for (std::size_t i = 0; i < w.size(); ++i) out.push_back({w[i], h[i], r[i]});
    return out;
}

std::vector<resonator::QiPoint> to_qi_points(const TraceFile& file) {
    if (file.kind != TraceKind::QiPower && file.kind != TraceKind::QiTemp) {
        throw SchemaError("expected a 'qi_power' or 'qi_temp' trace, got '" + std::string(to_string(file.kind)) + "'");
    }
    const auto& x = file.column(file.kind == TraceKind::QiPower ? "photon_number" : "temperature");
    const auto& q = file.column("q_internal");
    std::vector<resonator::QiPoint> out;
    for (std::size_t i = 0; i < x.size(); ++i) out.push_back({x[i], q[i]});
    return out;
}

std::vector<junction::AnnealPoint> to_anneal_points(const TraceFile& file) {
    require_kind(file, TraceKind::Anneal);
    const auto& t = file.column("time");
    const auto& r = file.column("jc_ratio");
    std::vector<junction::AnnealPoint> out;
    for (std::size_t i = 0; i < t.size(); ++i) out.push_back({t[i], r[i]});
    return out;
}

std::vector<junction::ExposurePoint> to_exposure_points(const TraceFile& file) {
    require_kind(file, TraceKind::Exposure);
    const auto& e = file.column("exposure");
    const auto& j = file.column("jc");
    std::vector<junction::ExposurePoint> out;
    for (std::size_t i = 0; i < e.size(); ++i) out.push_back({e[i], j[i]});
    return out;
}

std::pair<rcsj::IvTrace, rcsj::IvTrace> to_iv_traces(const TraceFile& file) {
    require_kind(file, TraceKind::Iv);
    const auto& i = file.column("current");
    const auto& v = file.column("voltage");
    rcsj::IvTrace up, down;
    up.direction = rcsj::SweepDirection::Up;
    down.direction = rcsj::SweepDirection::Down;
    if (file.has_column("sweep")) {
        const auto& s = file.column("sweep");
        for (std::size_t k = 0; k < i.size(); ++k) {
            (s[k] == 0.0 ? up : down).points.push_back({i[k], v[k], true});
        }
    } else {
        const auto peak = static_cast<std::size_t>(std::max_element(i.begin(), i.end()) - i.begin());
        for (std::size_t k = 0; k < i.size(); ++k) {
            (k <= peak ? up : down).points.push_back({i[k], v[k], true});
        }
    }
    return {up, down};
}

} // namespace scq::io
