#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rl/curve.hpp"

namespace rl {

// Ordered list of closed oriented components; the unit of all measurements.
struct Link {
    std::vector<std::shared_ptr<const Curve>> components;
    std::string name;

    const Curve& comp(std::size_t i) const { return *components[i]; }
    std::size_t size() const { return components.size(); }

    void validate() const;  // every component closed, count >= 1
};

Link make_link(std::vector<PiecewiseCurve> curves, std::string name = "");

// Link/curve JSON schema (numbers with >= 15 significant digits):
// {"components":[{"pieces":[{"type":"arc",...}|{"type":"segment",...}|
//                           {"type":"torus_section",...}]}]}
std::string link_to_json(const Link& link);
Link link_from_json(const std::string& text);
Link load_link_file(const std::string& path);
void save_link_file(const Link& link, const std::string& path);

}  // namespace rl
