#pragma once

// JSON API over an immutable Dataset, plus the HTTP transport.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "json.hpp"
#include "tibi/errors.hpp"
#include "tibi/render.hpp"
#include "tibi/view.hpp"

namespace tibi {

using QueryParams = std::multimap<std::string, std::string>;

// Bad request parameter; `code` is the machine-readable error code.
class ApiError : public Error {
public:
    ApiError(std::string code, const std::string& message, int status = 400)
        : Error(message), code_(std::move(code)), status_(status) {}

    const std::string& code() const noexcept { return code_; }
    int status() const noexcept { return status_; }

private:
    std::string code_;
    int status_;
};

struct FilterSpec {
    AttributeId attr;
    double lo = 0;
    double hi = 0;
};

// "attr:lo:hi" where attr is an index or descriptor; descriptors may contain
// ':' themselves, so lo and hi are taken from the right.
FilterSpec parse_filter_spec(std::string_view token);

// "row,col" with both in [0,8).
CellRef parse_cell_ref(std::string_view token);

inline constexpr int kMaxBinsPerAxis = 1000;
inline constexpr int kMaxExportSide = 16384;

// View parameters from a query: nx, ny, scaling, mode, filter (repeatable).
// Missing parameters fall back to `base`.
ViewState view_from_params(const QueryParams& params, const Dataset& dataset, const ViewState& base);

struct BinInfoRow {
    int category = 0;
    std::string label;
    Rgb color;
    std::int64_t count = 0;
    std::int64_t local_maximum = 0;   // #(bin)
    std::int64_t global_maximum = 0;  // #(category) over the whole dataset
};

struct BinSummary {
    int number = 0;  // 0-based bin index
    double min = 0;
    double max = 0;
};

struct BinInfo {
    AttributeId attr_x;
    AttributeId attr_y;
    BinSummary x_bin;
    std::optional<BinSummary> y_bin;  // absent on the diagonal
    Scaling scaling = Scaling::Global;
    CategoryMode mode = CategoryMode::EscCode;
    std::vector<BinInfoRow> rows;
};

BinInfo compute_bin_info(const Dataset& dataset, const ViewState& view, CellRef cell, int x_bin, int y_bin);

nlohmann::json to_json(const BinInfo& info);
nlohmann::json meta_json(const Dataset& dataset);
nlohmann::json scatter_json(const BinGrid& grid, Scaling scaling, std::span<const std::int64_t> category_totals);
nlohmann::json histogram_json(const HistGrid& hist, Scaling scaling, std::span<const std::int64_t> category_totals);

struct ApiResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

// Transport-independent request handling. The Dataset is never modified;
// per-session state holds only the zoomed cell.
class Api {
public:
    explicit Api(const Dataset& dataset);

    // `path` is the request path, e.g. "/api/cell".
    ApiResponse handle(std::string_view path, const QueryParams& params) const;

    ViewState session_view(const std::string& token) const;

private:
    ApiResponse cell(const QueryParams& params) const;
    ApiResponse bin_info(const QueryParams& params) const;
    ApiResponse export_image(const QueryParams& params) const;
    ApiResponse session(const QueryParams& params) const;
    ApiResponse zoom(const QueryParams& params) const;
    ViewState base_view(const QueryParams& params) const;

    const Dataset& dataset_;
    ViewState defaults_;
    mutable std::mutex sessions_mutex_;
    mutable std::unordered_map<std::string, ViewState> sessions_;
};

struct ServeOptions {
    std::string host = "0.0.0.0";
    int port = 8080;  // 0 picks a free port
    std::string static_dir;  // optional web UI root
};

// Runs an HTTP/1.1 server in a background thread until stop() or destruction.
class HttpServer {
public:
    HttpServer(const Dataset& dataset, ServeOptions options);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds and starts serving; returns the bound port.
    int start();
    void stop();
    // Blocks until the server stops.
    void wait();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace tibi
