#pragma once
#include "droplet/damping.hpp"
#include "droplet/hopf_lax.hpp"
#include "droplet/piecewise.hpp"
#include "droplet/viscous.hpp"

#include <map>
#include <string>

namespace droplet::scenario {

enum class Domain { quarter_plane, initial_value };
enum class Route { characteristic, viscous };

// fully validated, typed view of the raw key=value text
struct Compiled {
    std::string name;
    Domain domain = Domain::quarter_plane;
    Route route = Route::characteristic;
    damping::DampingSpec damp;
    piecewise::PiecewiseFn u0, v0, uB, vB;
    double x0 = 0, x1 = 1;
    int cells = 200;
    std::vector<double> times;
    hopflax::SearchParams search;
    int warp_resolution = 4096;
    viscous::ViscousParams visc;  // visc.length == 0 means derive from the data
};

struct Scenario {
    std::map<std::string, std::string> kv;

    static Scenario parse(const std::string& text);
    static Scenario load(const std::string& path);
    void set(const std::string& key, const std::string& value);
    Compiled compile() const;       // throws invalid_input on any problem
    std::string canonical() const;  // normalized, reparseable, byte-stable
};

} // namespace droplet::scenario
