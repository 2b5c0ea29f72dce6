#include "rpoly/rpoly.h"

#include <new>
#include <string>

#include "rpoly/error.hpp"
#include "rpoly/experiments.hpp"
#include "rpoly/functionals.hpp"
#include "rpoly/hull.hpp"
#include "rpoly/sampling.hpp"

struct rpoly_config {
    rpoly::ExperimentConfig config;
};

struct rpoly_report {
    rpoly::Report report;
    std::string json;
};

struct rpoly_body {
    rpoly::Body body;
};

struct rpoly_hull {
    rpoly::Hull hull;
};

namespace {

thread_local std::string last_error;

rpoly_status code_of(const rpoly::Error& e) {
    switch (e.kind()) {
        case rpoly::ErrorKind::invalid_input:
            return RPOLY_ERR_INVALID_ARGUMENT;
        case rpoly::ErrorKind::degenerate_input:
            return RPOLY_ERR_DEGENERATE;
        case rpoly::ErrorKind::data:
            return RPOLY_ERR_DATA;
        case rpoly::ErrorKind::config:
            return RPOLY_ERR_CONFIG;
        case rpoly::ErrorKind::io:
            return RPOLY_ERR_IO;
    }
    return RPOLY_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes at the boundary.
template <class F>
rpoly_status guard(F&& fn) {
    try {
        fn();
        last_error.clear();
        return RPOLY_OK;
    } catch (const rpoly::Error& e) {
        last_error = e.what();
        return code_of(e);
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = e.what();
    } catch (...) {
        last_error = "unknown error";
    }
    return RPOLY_ERR_INTERNAL;
}

rpoly_status null_argument(const char* what) {
    last_error = std::string("null argument: ") + what;
    return RPOLY_ERR_INVALID_ARGUMENT;
}

rpoly::Point to_point(int dim, const double* x) { return rpoly::Point(std::span<const double>(x, static_cast<std::size_t>(dim))); }

}  // namespace

extern "C" {

const char* rpoly_version(void) { return rpoly::kVersion.data(); }

const char* rpoly_last_error(void) { return last_error.c_str(); }

size_t rpoly_experiment_count(void) { return rpoly::experiment_catalog().size(); }

const char* rpoly_experiment_name(size_t index) {
    const auto& c = rpoly::experiment_catalog();
    return index < c.size() ? c[index].name.data() : nullptr;
}

const char* rpoly_experiment_description(size_t index) {
    const auto& c = rpoly::experiment_catalog();
    return index < c.size() ? c[index].description.data() : nullptr;
}

rpoly_status rpoly_config_parse(const char* json_text, rpoly_config** out) {
    if (json_text == nullptr || out == nullptr) return null_argument("rpoly_config_parse");
    *out = nullptr;
    return guard([&] { *out = new rpoly_config{rpoly::parse_config(json_text)}; });
}

rpoly_status rpoly_config_load(const char* path, rpoly_config** out) {
    if (path == nullptr || out == nullptr) return null_argument("rpoly_config_load");
    *out = nullptr;
    return guard([&] { *out = new rpoly_config{rpoly::load_config(path)}; });
}

int rpoly_config_workers(const rpoly_config* config) { return config ? config->config.workers : 0; }

const char* rpoly_config_output(const rpoly_config* config) { return config ? config->config.output.c_str() : ""; }

void rpoly_config_free(rpoly_config* config) { delete config; }

rpoly_status rpoly_run(const rpoly_config* config, int workers, rpoly_report** out) {
    if (config == nullptr || out == nullptr) return null_argument("rpoly_run");
    *out = nullptr;
    return guard([&] {
        auto* r = new rpoly_report{rpoly::run_experiment(config->config, workers), {}};
        r->json = rpoly::to_json_text(r->report.doc);
        *out = r;
    });
}

int64_t rpoly_report_failed_trials(const rpoly_report* report) { return report ? report->report.failed_trials : -1; }

rpoly_status rpoly_report_json(const rpoly_report* report, const char** text, size_t* length) {
    if (report == nullptr || text == nullptr) return null_argument("rpoly_report_json");
    *text = report->json.c_str();
    if (length != nullptr) *length = report->json.size();
    last_error.clear();
    return RPOLY_OK;
}

rpoly_status rpoly_report_write(const rpoly_report* report, const char* directory, int raw) {
    if (report == nullptr || directory == nullptr) return null_argument("rpoly_report_write");
    return guard([&] { rpoly::write_report(report->report, directory, raw != 0); });
}

void rpoly_report_free(rpoly_report* report) { delete report; }

rpoly_status rpoly_body_create(const char* kind, int dim, const double* params, size_t param_count, rpoly_body** out) {
    if (kind == nullptr || out == nullptr || (param_count > 0 && params == nullptr)) return null_argument("rpoly_body_create");
    *out = nullptr;
    return guard([&] {
        std::vector<double> p(params, params + param_count);
        *out = new rpoly_body{rpoly::Body::make(rpoly::parse_body_kind(kind), dim, p)};
    });
}

int rpoly_body_dim(const rpoly_body* body) { return body ? body->body.dim() : 0; }

rpoly_status rpoly_body_contains(const rpoly_body* body, const double* x, int* inside) {
    if (body == nullptr || x == nullptr || inside == nullptr) return null_argument("rpoly_body_contains");
    return guard([&] { *inside = body->body.contains(to_point(body->body.dim(), x)) ? 1 : 0; });
}

rpoly_status rpoly_body_minimal_cap_volume(const rpoly_body* body, const double* x, double* volume) {
    if (body == nullptr || x == nullptr || volume == nullptr) return null_argument("rpoly_body_minimal_cap_volume");
    return guard([&] { *volume = rpoly::minimal_cap_volume(body->body, to_point(body->body.dim(), x)); });
}

rpoly_status rpoly_body_sample(const rpoly_body* body, uint64_t seed, uint64_t stream_id, size_t count, double* out) {
    if (body == nullptr || (count > 0 && out == nullptr)) return null_argument("rpoly_body_sample");
    return guard([&] {
        rpoly::RngStream rng(seed, stream_id, rpoly::lanes::points);
        const int d = body->body.dim();
        for (size_t i = 0; i < count; ++i) {
            const rpoly::Point p = rpoly::sample_uniform(body->body, rng);
            for (int k = 0; k < d; ++k) out[i * static_cast<size_t>(d) + static_cast<size_t>(k)] = p[k];
        }
    });
}

void rpoly_body_free(rpoly_body* body) { delete body; }

rpoly_status rpoly_hull_build(int dim, const double* coords, size_t count, rpoly_hull** out) {
    if (out == nullptr || (count > 0 && coords == nullptr)) return null_argument("rpoly_hull_build");
    *out = nullptr;
    return guard([&] {
        std::vector<rpoly::Point> pts;
        pts.reserve(count);
        for (size_t i = 0; i < count; ++i) pts.push_back(to_point(dim, coords + i * static_cast<size_t>(dim)));
        *out = new rpoly_hull{rpoly::Hull::build(pts)};
    });
}

double rpoly_hull_volume(const rpoly_hull* hull) { return hull ? hull->hull.volume() : 0.0; }

rpoly_status rpoly_hull_face_count(const rpoly_hull* hull, int face_dim, int64_t* count) {
    if (hull == nullptr || count == nullptr) return null_argument("rpoly_hull_face_count");
    return guard([&] { *count = hull->hull.face_count(face_dim); });
}

rpoly_status rpoly_hull_insert(rpoly_hull* hull, const double* x, int* inserted) {
    if (hull == nullptr || x == nullptr) return null_argument("rpoly_hull_insert");
    return guard([&] {
        const auto delta = hull->hull.insert(to_point(hull->hull.dim(), x), false);
        if (inserted != nullptr) *inserted = delta.inserted ? 1 : 0;
    });
}

rpoly_status rpoly_hull_contains(const rpoly_hull* hull, const double* x, int* inside) {
    if (hull == nullptr || x == nullptr || inside == nullptr) return null_argument("rpoly_hull_contains");
    return guard([&] { *inside = hull->hull.contains(to_point(hull->hull.dim(), x)) ? 1 : 0; });
}

void rpoly_hull_free(rpoly_hull* hull) { delete hull; }

}  // extern "C"
