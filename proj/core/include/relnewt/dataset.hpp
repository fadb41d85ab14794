#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "relnewt/boundary.hpp"
#include "relnewt/hodograph.hpp"
#include "relnewt/scattering.hpp"

namespace relnewt {

// CSV schemas shared by the command line tools. Writers print every value
// with 17 significant digits so a write/read cycle is bit exact; readers are
// strict: the header must match one of the known schemas column for column,
// and every row must carry exactly the advertised fields. Violations throw
// SchemaMismatch naming the offending line.

/** One labeled boundary transit: the grid angles plus the measured datum. */
struct BoundaryRow {
    double theta0 = 0.0;
    double theta1 = 0.0;
    BoundaryDatum d;
};

/** One labeled scattering experiment: manifold coordinates plus the datum. */
struct ScatteringRow {
    double phi = 0.0;
    double rho = 0.0;
    ScatteringDatum d;
};

/** One exported distance field node. Boundary targets use theta_x, interior
    targets store the node position. */
struct HodographRow {
    double theta_zeta = 0.0;
    double theta_x = 0.0;
    Vec x;
    double l = 0.0;
    Vec k;
};

struct BoundaryCsv {
    int dim = 2;
    std::vector<BoundaryRow> rows;
};

struct ScatteringCsv {
    int dim = 2;
    std::vector<ScatteringRow> rows;
};

struct HodographCsv {
    bool boundary_target = true;
    int dim = 2;
    std::vector<HodographRow> rows;
};

/** Decimal rendering used for every floating CSV field. */
std::string format_value(double v);

void write_boundary_csv(std::ostream& out, int dim, const std::vector<BoundaryRow>& rows);
BoundaryCsv read_boundary_csv(std::istream& in);

void write_scattering_csv(std::ostream& out, int dim,
                          const std::vector<ScatteringRow>& rows);
ScatteringCsv read_scattering_csv(std::istream& in);

void write_hodograph_csv(std::ostream& out, const HodographField& field);
HodographCsv read_hodograph_csv(std::istream& in);

// File wrappers; schema errors are rethrown with the path prefixed, an
// unopenable file is a ConfigError.
void save_boundary_csv(const std::string& path, int dim,
                       const std::vector<BoundaryRow>& rows);
BoundaryCsv load_boundary_csv(const std::string& path);
void save_scattering_csv(const std::string& path, int dim,
                         const std::vector<ScatteringRow>& rows);
ScatteringCsv load_scattering_csv(const std::string& path);
void save_hodograph_csv(const std::string& path, const HodographField& field);
HodographCsv load_hodograph_csv(const std::string& path);

} // namespace relnewt
