#pragma once

#include <string>

#include "geometry.hpp"
#include "localsys.hpp"

namespace lagmirror {

/// A Lagrangian graph carrying a local system.
struct SceneObject {
    LagrangianGraph graph;
    LocalSystem local_system;

    const std::string& id() const { return graph.id; }
    int rank() const { return local_system.rank(); }

    /// Structural checks plus transversality to the zero section.
    void validate(const RootOptions& opts = {}) const {
        graph.validate();
        local_system.validate(graph.id);
        check_transversality(graph, opts);
    }
};

}  // namespace lagmirror
