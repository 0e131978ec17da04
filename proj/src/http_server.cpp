#include <atomic>
#include <thread>

#include "httplib.h"
#include "tibi/errors.hpp"
#include "tibi/service.hpp"

namespace tibi {

struct HttpServer::Impl {
    Impl(const Dataset& dataset, ServeOptions opts) : api(dataset), options(std::move(opts)) {}

    Api api;
    ServeOptions options;
    httplib::Server server;
    std::thread thread;
};

HttpServer::HttpServer(const Dataset& dataset, ServeOptions options)
    : impl_(std::make_unique<Impl>(dataset, std::move(options))) {
    auto& server = impl_->server;
    const Api& api = impl_->api;
    server.Get(R"(/api/[a-z]+)", [&api](const httplib::Request& req, httplib::Response& res) {
        QueryParams params(req.params.begin(), req.params.end());
        ApiResponse out = api.handle(req.path, params);
        res.status = out.status;
        res.set_content(out.body, out.content_type);
    });
    if (!impl_->options.static_dir.empty() && !server.set_mount_point("/", impl_->options.static_dir)) {
        throw ConfigError("static directory " + impl_->options.static_dir + " does not exist");
    }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start() {
    auto& server = impl_->server;
    int port = impl_->options.port;
    if (port == 0) {
        port = server.bind_to_any_port(impl_->options.host);
    } else if (!server.bind_to_port(impl_->options.host, port)) {
        port = -1;
    }
    if (port < 0) throw ConfigError("cannot bind " + impl_->options.host + ":" + std::to_string(impl_->options.port));
    impl_->thread = std::thread([&server] { server.listen_after_bind(); });
    server.wait_until_ready();
    return port;
}

void HttpServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

void HttpServer::wait() {
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace tibi
