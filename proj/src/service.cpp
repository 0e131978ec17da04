#include "tibi/service.hpp"

#include <cmath>

#include "text_util.hpp"
#include "tibi/errors.hpp"

namespace tibi {

namespace {

using nlohmann::json;

std::optional<std::string> param(const QueryParams& params, const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
}

int int_param(const QueryParams& params, const std::string& key, int lo, int hi, std::optional<int> fallback) {
    auto v = param(params, key);
    if (!v) {
        if (fallback) return *fallback;
        throw ApiError("missing_parameter", "missing parameter '" + key + "'");
    }
    auto parsed = detail::parse_int(*v);
    if (!parsed || *parsed < lo || *parsed > hi) {
        throw ApiError("bad_parameter",
                       "parameter '" + key + "' must be an integer in [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
    }
    return static_cast<int>(*parsed);
}

json attr_json(AttributeId a) { return json{{"index", a.index()}, {"descriptor", a.descriptor()}}; }

json color_json(Rgb c) { return json::array({c.r, c.g, c.b}); }

json totals_json(std::span<const std::int64_t> totals) { return json(std::vector<std::int64_t>(totals.begin(), totals.end())); }

json categories_json(CategoryMode mode) {
    json out = json::array();
    for (int k = 0; k < category_count(mode); ++k) {
        TileStyle s = category_tile(mode, k);
        out.push_back({{"category", k},
                       {"label", category_label(mode, k)},
                       {"color", color_json(s.color)},
                       {"position", json::array({s.position.row, s.position.col})}});
    }
    return out;
}

ApiResponse json_response(const json& j, int status = 200) {
    return ApiResponse{status, "application/json", j.dump()};
}

ApiResponse error_response(int status, const std::string& code, const std::string& message) {
    return json_response(json{{"error", {{"code", code}, {"message", message}}}}, status);
}

}  // namespace

FilterSpec parse_filter_spec(std::string_view token) {
    auto last = token.rfind(':');
    if (last == std::string_view::npos || last == 0) {
        throw DomainError("filter '" + std::string(token) + "' must look like attr:lo:hi");
    }
    auto mid = token.rfind(':', last - 1);
    if (mid == std::string_view::npos) throw DomainError("filter '" + std::string(token) + "' must look like attr:lo:hi");
    auto lo = detail::parse_double(token.substr(mid + 1, last - mid - 1));
    auto hi = detail::parse_double(token.substr(last + 1));
    if (!lo || !hi) throw DomainError("filter '" + std::string(token) + "' has non-numeric bounds");
    return FilterSpec{parse_attribute(token.substr(0, mid)), *lo, *hi};
}

CellRef parse_cell_ref(std::string_view token) {
    auto comma = token.find(',');
    if (comma == std::string_view::npos) throw DomainError("cell must look like ROW,COL");
    auto row = detail::parse_int(token.substr(0, comma));
    auto col = detail::parse_int(token.substr(comma + 1));
    if (!row || !col || *row < 0 || *row >= kAttributes || *col < 0 || *col >= kAttributes) {
        throw DomainError("cell '" + std::string(token) + "' outside the 8x8 matrix");
    }
    return CellRef{static_cast<int>(*row), static_cast<int>(*col)};
}

ViewState view_from_params(const QueryParams& params, const Dataset& dataset, const ViewState& base) {
    ViewState v = base;
    v.nx = int_param(params, "nx", 1, kMaxBinsPerAxis, base.nx);
    v.ny = int_param(params, "ny", 1, kMaxBinsPerAxis, base.ny);
    if (auto s = param(params, "scaling")) v.scaling = parse_scaling(*s);
    if (auto m = param(params, "mode")) v.mode = parse_category_mode(*m);
    v.filters = FilterState::full(dataset);
    auto apply = [&](std::string_view token) {
        if (token.empty()) return;
        FilterSpec f = parse_filter_spec(token);
        v.filters = apply_filter(v.filters, f.attr, f.lo, f.hi);
    };
    auto [begin, end] = params.equal_range("filter");
    for (auto it = begin; it != end; ++it) apply(it->second);
    if (auto list = param(params, "filters")) {
        for (auto token : detail::split(*list, ';')) apply(token);
    }
    return v;
}

BinInfo compute_bin_info(const Dataset& dataset, const ViewState& view, CellRef cell, int x_bin, int y_bin) {
    view.validate();
    BinInfo info;
    info.attr_x = AttributeId(cell.col);
    info.attr_y = AttributeId(cell.row);
    info.scaling = view.scaling;
    info.mode = view.mode;
    auto totals = dataset.category_totals(view.mode);
    const int ncat = category_count(view.mode);

    auto summary = [](int i, const Range& r, int n) {
        if (r.lo == r.hi) return BinSummary{i, r.lo, r.hi};
        const double w = r.width() / n;
        return BinSummary{i, r.lo + w * i, i + 1 == n ? r.hi : r.lo + w * (i + 1)};
    };

    std::vector<std::int64_t> counts(static_cast<std::size_t>(ncat));
    std::int64_t bin_total = 0;
    if (cell.row == cell.col) {
        auto hist = compute_histogram_bins(dataset, info.attr_x, view.nx, view.filters, view.mode);
        if (x_bin < 0 || x_bin >= hist.n) throw DomainError("bin index outside the histogram");
        info.x_bin = summary(x_bin, hist.range, hist.n);
        for (int k = 0; k < ncat; ++k) counts[static_cast<std::size_t>(k)] = hist.count(x_bin, k);
        bin_total = hist.total(x_bin);
    } else {
        auto grid = compute_scatter_bins(dataset, info.attr_x, info.attr_y, view.nx, view.ny, view.filters, view.mode);
        if (x_bin < 0 || x_bin >= grid.nx || y_bin < 0 || y_bin >= grid.ny) {
            throw DomainError("bin index outside the scatterplot grid");
        }
        info.x_bin = summary(x_bin, grid.x_range, grid.nx);
        info.y_bin = summary(y_bin, grid.y_range, grid.ny);
        for (int k = 0; k < ncat; ++k) counts[static_cast<std::size_t>(k)] = grid.count(x_bin, y_bin, k);
        bin_total = grid.total(x_bin, y_bin);
    }
    for (int k = 0; k < ncat; ++k) {
        info.rows.push_back(BinInfoRow{k, category_label(view.mode, k), category_tile(view.mode, k).color,
                                       counts[static_cast<std::size_t>(k)], bin_total,
                                       totals[static_cast<std::size_t>(k)]});
    }
    return info;
}

json to_json(const BinInfo& info) {
    auto bin = [](const BinSummary& b) { return json{{"number", b.number}, {"min", b.min}, {"max", b.max}}; };
    json rows = json::array();
    for (const auto& r : info.rows) {
        rows.push_back({{"category", r.category},
                        {"label", r.label},
                        {"color", color_json(r.color)},
                        {"count", r.count},
                        {"local_maximum", r.local_maximum},
                        {"global_maximum", r.global_maximum}});
    }
    return json{{"attr_x", attr_json(info.attr_x)},
                {"attr_y", attr_json(info.attr_y)},
                {"x_bin", bin(info.x_bin)},
                {"y_bin", info.y_bin ? bin(*info.y_bin) : json(nullptr)},
                {"averaging", to_string(info.scaling)},
                {"encoding", to_string(info.mode)},
                {"local_maximum", info.rows.empty() ? 0 : info.rows.front().local_maximum},
                {"categories", rows}};
}

json meta_json(const Dataset& dataset) {
    const FilterState full = FilterState::full(dataset);
    json attrs = json::array();
    for (AttributeId a : all_attributes()) {
        const Range r = dataset.attribute_range(a);
        const Range d = full.range(a);
        attrs.push_back({{"index", a.index()},
                         {"descriptor", a.descriptor()},
                         {"range", json::array({r.lo, r.hi})},
                         {"filter_domain", json::array({d.lo, d.hi})},
                         {"log_scaled", a.is_length()}});
    }
    const ViewState defaults = ViewState::defaults(dataset);
    return json{{"segment_count", dataset.size()},
                {"reference", to_string(dataset.reference())},
                {"cpg_available", dataset.cpg_available()},
                {"attributes", attrs},
                {"category_totals",
                 {{"code", totals_json(dataset.category_totals(CategoryMode::EscCode))},
                  {"length", totals_json(dataset.category_totals(CategoryMode::LengthCategory))}}},
                {"categories",
                 {{"code", categories_json(CategoryMode::EscCode)},
                  {"length", categories_json(CategoryMode::LengthCategory)}}},
                {"defaults",
                 {{"nx", defaults.nx},
                  {"ny", defaults.ny},
                  {"scaling", to_string(defaults.scaling)},
                  {"mode", to_string(defaults.mode)}}}};
}

json scatter_json(const BinGrid& grid, Scaling scaling, std::span<const std::int64_t> category_totals) {
    json bins = json::array();
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.ny; ++j) {
            const std::int64_t total = grid.total(i, j);
            if (total == 0) continue;
            json counts = json::array();
            json alphas = json::array();
            for (int k = 0; k < grid.ncat; ++k) {
                const std::int64_t c = grid.count(i, j, k);
                counts.push_back(c);
                alphas.push_back(alpha(scaling, c, total, category_totals[static_cast<std::size_t>(k)]));
            }
            bins.push_back({{"x", i}, {"y", j}, {"total", total}, {"counts", counts}, {"alphas", alphas}});
        }
    }
    return json{{"kind", "scatter"},
                {"attr_x", attr_json(grid.attr_x)},
                {"attr_y", attr_json(grid.attr_y)},
                {"nx", grid.nx},
                {"ny", grid.ny},
                {"x_range", json::array({grid.x_range.lo, grid.x_range.hi})},
                {"y_range", json::array({grid.y_range.lo, grid.y_range.hi})},
                {"mode", to_string(grid.mode)},
                {"scaling", to_string(scaling)},
                {"category_totals", totals_json(category_totals)},
                {"filtered_total", grid.filtered_total()},
                {"bins", bins}};
}

json histogram_json(const HistGrid& hist, Scaling scaling, std::span<const std::int64_t> category_totals) {
    const std::int64_t max = hist.max_count();
    json series = json::array();
    for (int k = 0; k < hist.ncat; ++k) {
        json counts = json::array();
        json heights = json::array();
        for (int i = 0; i < hist.n; ++i) {
            const std::int64_t c = hist.count(i, k);
            counts.push_back(c);
            double h = 0.0;
            if (c > 0) {
                h = c == max ? 1.0
                    : scaling == Scaling::Local
                        ? static_cast<double>(c) / static_cast<double>(max)
                        : std::log1p(static_cast<double>(c)) / std::log1p(static_cast<double>(max));
            }
            heights.push_back(h);
        }
        series.push_back({{"category", k},
                          {"label", category_label(hist.mode, k)},
                          {"color", color_json(category_tile(hist.mode, k).color)},
                          {"counts", counts},
                          {"heights", heights}});
    }
    return json{{"kind", "histogram"},
                {"attr", attr_json(hist.attr)},
                {"n", hist.n},
                {"range", json::array({hist.range.lo, hist.range.hi})},
                {"mode", to_string(hist.mode)},
                {"scaling", to_string(scaling)},
                {"category_totals", totals_json(category_totals)},
                {"filtered_total", hist.filtered_total()},
                {"max_count", max},
                {"series", series}};
}

Api::Api(const Dataset& dataset) : dataset_(dataset), defaults_(ViewState::defaults(dataset)) {}

ViewState Api::session_view(const std::string& token) const {
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(token);
    return it == sessions_.end() ? defaults_ : it->second;
}

ViewState Api::base_view(const QueryParams& params) const {
    auto token = param(params, "session");
    ViewState base = token ? session_view(*token) : defaults_;
    return view_from_params(params, dataset_, base);
}

ApiResponse Api::handle(std::string_view path, const QueryParams& params) const {
    try {
        if (path == "/api/meta") return json_response(meta_json(dataset_));
        if (path == "/api/cell") return cell(params);
        if (path == "/api/bininfo") return bin_info(params);
        if (path == "/api/export") return export_image(params);
        if (path == "/api/session") return session(params);
        if (path == "/api/zoom") return zoom(params);
        return error_response(404, "not_found", "unknown endpoint " + std::string(path));
    } catch (const ApiError& e) {
        return error_response(e.status(), e.code(), e.what());
    } catch (const DomainError& e) {
        return error_response(400, "bad_parameter", e.what());
    } catch (const RangeError& e) {
        return error_response(400, "bad_parameter", e.what());
    } catch (const std::exception& e) {
        return error_response(500, "internal", e.what());
    }
}

ApiResponse Api::cell(const QueryParams& params) const {
    const int row = int_param(params, "row", 0, kAttributes - 1, std::nullopt);
    const int col = int_param(params, "col", 0, kAttributes - 1, std::nullopt);
    const ViewState view = base_view(params);
    auto totals = dataset_.category_totals(view.mode);
    json body;
    if (row == col) {
        body = histogram_json(compute_histogram_bins(dataset_, AttributeId(col), view.nx, view.filters, view.mode),
                              view.scaling, totals);
    } else {
        body = scatter_json(compute_scatter_bins(dataset_, AttributeId(col), AttributeId(row), view.nx, view.ny,
                                                 view.filters, view.mode),
                            view.scaling, totals);
    }
    body["row"] = row;
    body["col"] = col;
    return json_response(body);
}

ApiResponse Api::bin_info(const QueryParams& params) const {
    const int row = int_param(params, "row", 0, kAttributes - 1, std::nullopt);
    const int col = int_param(params, "col", 0, kAttributes - 1, std::nullopt);
    const int x = int_param(params, "x", 0, kMaxBinsPerAxis - 1, std::nullopt);
    const int y = int_param(params, "y", 0, kMaxBinsPerAxis - 1, row == col ? std::optional<int>(0) : std::nullopt);
    const ViewState view = base_view(params);
    return json_response(to_json(compute_bin_info(dataset_, view, CellRef{row, col}, x, y)));
}

ApiResponse Api::export_image(const QueryParams& params) const {
    const ExportFormat format = parse_export_format(param(params, "format").value_or("svg"));
    const int width = int_param(params, "width", 1, kMaxExportSide, 1000);
    const int height = int_param(params, "height", 1, kMaxExportSide, 1000);
    ViewState view = base_view(params);
    if (auto c = param(params, "cell")) view.zoom = parse_cell_ref(*c);
    const Document doc = render_splom(dataset_, view, width, height);
    auto bytes = tibi::export_image(doc, format, width, height);
    return ApiResponse{200, format == ExportFormat::Svg ? "image/svg+xml" : "image/png",
                       std::string(bytes.begin(), bytes.end())};
}

ApiResponse Api::session(const QueryParams& params) const {
    auto token = param(params, "session");
    if (!token || token->empty()) throw ApiError("missing_parameter", "missing parameter 'session'");
    const ViewState v = session_view(*token);
    return json_response(json{{"session", *token},
                              {"zoom", v.zoom ? json::array({v.zoom->row, v.zoom->col}) : json(nullptr)}});
}

ApiResponse Api::zoom(const QueryParams& params) const {
    auto token = param(params, "session");
    if (!token || token->empty()) throw ApiError("missing_parameter", "missing parameter 'session'");
    const CellRef cell{int_param(params, "row", 0, kAttributes - 1, std::nullopt),
                       int_param(params, "col", 0, kAttributes - 1, std::nullopt)};
    std::optional<CellRef> zoom;
    {
        std::lock_guard lock(sessions_mutex_);
        auto [it, inserted] = sessions_.try_emplace(*token, defaults_);
        auto& state = it->second;
        // Selecting the zoomed cell again returns to the matrix.
        state.zoom = state.zoom == cell ? std::nullopt : std::optional<CellRef>(cell);
        zoom = state.zoom;
    }
    return json_response(json{{"session", *token},
                              {"zoom", zoom ? json::array({zoom->row, zoom->col}) : json(nullptr)}});
}

}  // namespace tibi
