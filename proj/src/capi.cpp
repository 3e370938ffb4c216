#include "droplet.h"

#include "droplet/errors.hpp"
#include "droplet/runner.hpp"

#include <cstring>
#include <string>

struct droplet_scenario {
    droplet::scenario::Scenario sc;
};

struct droplet_result {
    droplet::runner::RunResult run;
    std::vector<droplet::runner::ConvergenceRow> rows;
    droplet::runner::CheckReport report;
    bool has_checks = false;
};

namespace {

thread_local std::string g_last_error;

template <class F>
droplet_status guarded(F&& body) {
    try {
        g_last_error.clear();
        return body();
    } catch (const droplet::invalid_input& e) {
        g_last_error = e.what();
        return DROPLET_INVALID_INPUT;
    } catch (const droplet::numeric_error& e) {
        g_last_error = e.what();
        return DROPLET_NUMERIC_ERROR;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DROPLET_NUMERIC_ERROR;
    }
}

droplet_status fill_buffer(const std::string& text, char* buf, size_t cap,
                           size_t* needed) {
    if (needed) *needed = text.size() + 1;
    if (!buf) {
        g_last_error = "null buffer";
        return DROPLET_INVALID_INPUT;
    }
    if (cap < text.size() + 1) {
        g_last_error = "buffer too small; need " + std::to_string(text.size() + 1) +
                       " bytes";
        return DROPLET_INVALID_INPUT;
    }
    std::memcpy(buf, text.c_str(), text.size() + 1);
    return DROPLET_OK;
}

} // namespace

extern "C" {

const char* droplet_version(void) { return "1.0.0"; }

const char* droplet_last_error(void) { return g_last_error.c_str(); }

droplet_status droplet_scenario_parse(const char* text, droplet_scenario** out) {
    return guarded([&]() -> droplet_status {
        if (!text || !out) throw droplet::invalid_input("null argument");
        *out = nullptr;
        auto* sc = new droplet_scenario{droplet::scenario::Scenario::parse(text)};
        sc->sc.compile(); // reject unusable configs up front
        *out = sc;
        return DROPLET_OK;
    });
}

droplet_status droplet_scenario_load(const char* path, droplet_scenario** out) {
    return guarded([&]() -> droplet_status {
        if (!path || !out) throw droplet::invalid_input("null argument");
        *out = nullptr;
        auto* sc = new droplet_scenario{droplet::scenario::Scenario::load(path)};
        try {
            sc->sc.compile();
        } catch (...) {
            delete sc;
            throw;
        }
        *out = sc;
        return DROPLET_OK;
    });
}

droplet_status droplet_scenario_set(droplet_scenario* sc, const char* key,
                                    const char* value) {
    return guarded([&]() -> droplet_status {
        if (!sc || !key || !value) throw droplet::invalid_input("null argument");
        droplet::scenario::Scenario trial = sc->sc;
        trial.set(key, value);
        trial.compile(); // keep the stored scenario valid at all times
        sc->sc = std::move(trial);
        return DROPLET_OK;
    });
}

droplet_status droplet_scenario_name(const droplet_scenario* sc, char* buf,
                                     size_t cap, size_t* needed) {
    return guarded([&]() -> droplet_status {
        if (!sc) throw droplet::invalid_input("null argument");
        return fill_buffer(sc->sc.compile().name, buf, cap, needed);
    });
}

droplet_status droplet_scenario_canonical(const droplet_scenario* sc, char* buf,
                                          size_t cap, size_t* needed) {
    return guarded([&]() -> droplet_status {
        if (!sc) throw droplet::invalid_input("null argument");
        return fill_buffer(sc->sc.canonical(), buf, cap, needed);
    });
}

void droplet_scenario_free(droplet_scenario* sc) { delete sc; }

droplet_status droplet_solve(const droplet_scenario* sc, const char* out_dir,
                             droplet_result** out) {
    return guarded([&]() -> droplet_status {
        if (!sc || !out) throw droplet::invalid_input("null argument");
        *out = nullptr;
        auto* r = new droplet_result;
        try {
            if (out_dir && *out_dir)
                r->run = droplet::runner::run(sc->sc, out_dir);
            else
                r->run = droplet::runner::execute(sc->sc);
        } catch (...) {
            delete r;
            throw;
        }
        *out = r;
        return DROPLET_OK;
    });
}

droplet_status droplet_converge(const droplet_scenario* sc, const int* cells,
                                int n, const char* out_dir,
                                droplet_result** out) {
    return guarded([&]() -> droplet_status {
        if (!sc || !cells || !out) throw droplet::invalid_input("null argument");
        if (n < 2) throw droplet::invalid_input("convergence needs at least two cell counts");
        *out = nullptr;
        auto* r = new droplet_result;
        try {
            std::vector<int> counts(cells, cells + n);
            r->rows = droplet::runner::converge(sc->sc, counts,
                                                out_dir ? out_dir : "");
        } catch (...) {
            delete r;
            throw;
        }
        *out = r;
        return DROPLET_OK;
    });
}

droplet_status droplet_verify(const droplet_scenario* sc, double tol_scale,
                              droplet_result** out) {
    return guarded([&]() -> droplet_status {
        if (!sc || !out) throw droplet::invalid_input("null argument");
        *out = nullptr;
        auto* r = new droplet_result;
        try {
            r->report = droplet::runner::verify_run(sc->sc, tol_scale);
            r->has_checks = true;
        } catch (...) {
            delete r;
            throw;
        }
        *out = r;
        if (!r->report.all_passed) {
            g_last_error = "one or more verification checks failed";
            return DROPLET_CHECK_FAILURE;
        }
        return DROPLET_OK;
    });
}

int droplet_result_slice_count(const droplet_result* r) {
    return r ? (int)r->run.physical.slices.size() : 0;
}

droplet_status droplet_result_slice(const droplet_result* r, int slice,
                                    double* time, const double** x,
                                    const double** u, const double** V, int* n) {
    return guarded([&]() -> droplet_status {
        if (!r) throw droplet::invalid_input("null argument");
        if (slice < 0 || slice >= (int)r->run.physical.slices.size())
            throw droplet::invalid_input("slice index out of range");
        const auto& sl = r->run.physical.slices[slice];
        if (time) *time = sl.time;
        if (x) *x = sl.p.grid.data();
        if (u) *u = sl.p.values.data();
        if (V) *V = sl.V.values.data();
        if (n) *n = (int)sl.p.grid.size();
        return DROPLET_OK;
    });
}

int droplet_result_check_count(const droplet_result* r) {
    return r && r->has_checks ? (int)r->report.checks.size() : 0;
}

droplet_status droplet_result_check(const droplet_result* r, int idx,
                                    char* name_buf, size_t name_cap,
                                    int* passed, double* value, double* bound) {
    return guarded([&]() -> droplet_status {
        if (!r) throw droplet::invalid_input("null argument");
        if (!r->has_checks || idx < 0 || idx >= (int)r->report.checks.size())
            throw droplet::invalid_input("check index out of range");
        const auto& ch = r->report.checks[idx];
        if (passed) *passed = ch.passed ? 1 : 0;
        if (value) *value = ch.value;
        if (bound) *bound = ch.bound;
        if (name_buf) return fill_buffer(ch.name, name_buf, name_cap, nullptr);
        return DROPLET_OK;
    });
}

int droplet_result_passed(const droplet_result* r) {
    if (!r) return 0;
    return !r->has_checks || r->report.all_passed ? 1 : 0;
}

int droplet_result_convergence_count(const droplet_result* r) {
    return r ? (int)r->rows.size() : 0;
}

droplet_status droplet_result_convergence(const droplet_result* r, int idx,
                                          int* cells, double* distance) {
    return guarded([&]() -> droplet_status {
        if (!r) throw droplet::invalid_input("null argument");
        if (idx < 0 || idx >= (int)r->rows.size())
            throw droplet::invalid_input("row index out of range");
        if (cells) *cells = r->rows[idx].cells;
        if (distance) *distance = r->rows[idx].distance;
        return DROPLET_OK;
    });
}

void droplet_result_free(droplet_result* r) { delete r; }

} // extern "C"
