// tibi: segment a genome into a dataset, render tiled binned scatterplot
// matrices, or serve the explorer API.
//
//   tibi segment manifest.json dataset.tsv
//   tibi render dataset.tsv out.svg --bins-x 50 --bins-y 50 --scaling global
//   tibi serve dataset.tsv --port 8080 --static-dir webui/dist
//
// Exit codes: 0 ok, 1 usage error, 2 data error.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "tibi/dataset_io.hpp"
#include "tibi/errors.hpp"
#include "tibi/render.hpp"
#include "tibi/service.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int run_segment(const std::string& manifest_path, const std::string& output_path) {
    const tibi::Manifest manifest = tibi::load_manifest(manifest_path);
    const tibi::Dataset dataset = tibi::build_from_manifest(manifest);
    tibi::save_dataset(dataset, output_path);
    std::cout << dataset.size() << " segments written to " << output_path << "\n";
    if (!dataset.cpg_available()) std::cerr << "warning: no genome sequence or CpG track; CpG-density is 0\n";
    return 0;
}

struct RenderArgs {
    std::string dataset;
    std::string output;
    int bins_x = 50;
    int bins_y = 50;
    std::string scaling = "global";
    std::string mode = "code";
    std::vector<std::string> filters;
    int width = 1000;
    int height = 1000;
    std::string cell;
    std::string format;
};

int run_render(const RenderArgs& args) {
    // Resolve everything that can be a usage error before touching the data.
    std::string ext = std::filesystem::path(args.output).extension().string();
    if (!ext.empty()) ext.erase(0, 1);
    tibi::ExportFormat format;
    try {
        format = tibi::parse_export_format(args.format.empty() ? ext : args.format);
        if (!args.format.empty() && !ext.empty() && tibi::parse_export_format(ext) != format) {
            throw UsageError("--format " + args.format + " conflicts with output extension ." + ext);
        }
    } catch (const tibi::DomainError& e) {
        throw UsageError(e.what());
    }

    tibi::ViewState view;
    std::vector<tibi::FilterSpec> filters;
    try {
        view.scaling = tibi::parse_scaling(args.scaling);
        view.mode = tibi::parse_category_mode(args.mode);
        view.nx = args.bins_x;
        view.ny = args.bins_y;
        if (!args.cell.empty()) view.zoom = tibi::parse_cell_ref(args.cell);
        for (const auto& f : args.filters) filters.push_back(tibi::parse_filter_spec(f));
        view.validate();
    } catch (const tibi::DomainError& e) {
        throw UsageError(e.what());
    }

    const tibi::Dataset dataset = tibi::load_dataset(args.dataset);
    view.filters = tibi::FilterState::full(dataset);
    try {
        for (const auto& f : filters) view.filters = tibi::apply_filter(view.filters, f.attr, f.lo, f.hi);
    } catch (const tibi::DomainError& e) {
        throw UsageError(e.what());
    }
    const tibi::Document doc = tibi::render_splom(dataset, view, args.width, args.height);
    const auto bytes = tibi::export_image(doc, format, args.width, args.height);
    tibi::write_file(args.output, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    return 0;
}

tibi::HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server != nullptr) g_server->stop();
}

int run_serve(const std::string& dataset_path, tibi::ServeOptions options, bool port_given) {
    if (!port_given) {
        if (const char* env = std::getenv("TIBI_PORT")) {
            try {
                options.port = std::stoi(env);
            } catch (const std::exception&) {
                throw UsageError(std::string("TIBI_PORT is not a port number: ") + env);
            }
        }
    }
    const tibi::Dataset dataset = tibi::load_dataset(dataset_path);
    tibi::HttpServer server(dataset, options);
    const int port = server.start();
    std::cout << "serving " << dataset.size() << " segments on http://" << options.host << ":" << port << "\n"
              << std::flush;
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.wait();
    g_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tiled binned scatterplot matrices for chromatin segment data"};
    app.require_subcommand(1);

    std::string manifest_path, segment_out;
    auto* segment = app.add_subcommand("segment", "Segment the genome and write the dataset TSV");
    segment->add_option("manifest", manifest_path, "JSON manifest")->required()->check(CLI::ExistingFile);
    segment->add_option("output", segment_out, "Dataset TSV to write")->required();

    RenderArgs r;
    auto* render = app.add_subcommand("render", "Render the matrix (or one cell) to SVG or PNG");
    render->add_option("dataset", r.dataset, "Dataset TSV")->required()->check(CLI::ExistingFile);
    render->add_option("output", r.output, "Output image (.svg or .png)")->required();
    render->add_option("--bins-x", r.bins_x, "Bins on the x-axis")->check(CLI::Range(1, tibi::kMaxBinsPerAxis));
    render->add_option("--bins-y", r.bins_y, "Bins on the y-axis")->check(CLI::Range(1, tibi::kMaxBinsPerAxis));
    render->add_option("--scaling", r.scaling, "local or global");
    render->add_option("--mode", r.mode, "code or length");
    render->add_option("--filter", r.filters, "attr:lo:hi (repeatable)");
    render->add_option("--width", r.width, "Image width in pixels")->check(CLI::Range(1, tibi::kMaxExportSide));
    render->add_option("--height", r.height, "Image height in pixels")->check(CLI::Range(1, tibi::kMaxExportSide));
    render->add_option("--cell", r.cell, "ROW,COL of a single cell to render");
    render->add_option("--format", r.format, "svg or png (default: from the output extension)");

    std::string serve_dataset;
    tibi::ServeOptions serve_opts;
    auto* serve = app.add_subcommand("serve", "Serve the JSON API (and optionally the web UI)");
    serve->add_option("dataset", serve_dataset, "Dataset TSV")->required()->check(CLI::ExistingFile);
    auto* port_opt = serve->add_option("--port", serve_opts.port, "Port (TIBI_PORT overrides the default 8080)")
                         ->check(CLI::Range(0, 65535));
    serve->add_option("--host", serve_opts.host, "Bind address");
    serve->add_option("--static-dir", serve_opts.static_dir, "Directory served at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*segment) return run_segment(manifest_path, segment_out);
        if (*render) return run_render(r);
        if (*serve) return run_serve(serve_dataset, serve_opts, port_opt->count() > 0);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tibi::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
