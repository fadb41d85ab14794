#pragma once

// The three standing experiment setups used across the test suite:
// a free unit disk at energy 2, the same disk with a centered radial bump,
// and with a smaller off center bump. c = 1 throughout.

#include "relnewt/dynamics.hpp"
#include "relnewt/model.hpp"

namespace fx {

using relnewt::Bump;
using relnewt::ConvexDomain;
using relnewt::EnergyContext;
using relnewt::PotentialModel;
using relnewt::Vec;

inline ConvexDomain unit_disk() { return ConvexDomain::disk(2, Vec(0.0, 0.0), 1.0); }

inline PotentialModel free_model() { return PotentialModel(2, {}); }

inline PotentialModel radial_bump() {
    return PotentialModel(2, {Bump{Vec(0.0, 0.0), 0.1, 0.8}});
}

inline PotentialModel offset_bump() {
    return PotentialModel(2, {Bump{Vec(0.3, 0.1), 0.05, 0.5}});
}

inline EnergyContext energy2() { return EnergyContext{2.0, 1.0, 2}; }

} // namespace fx
