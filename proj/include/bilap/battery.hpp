#pragma once

#include <string>
#include <vector>

namespace bilap {

/// One check of the built-in verification battery.
struct CriterionResult {
    int number = 0;
    std::string label;
    bool passed = false;
    double seconds = 0.0;
    std::string detail;
};

/// Run the full desk-scale verification battery (13 checks covering the
/// discrete operators, the vertex-condition algebra, the FEM spectra and
/// the qualitative classification). Each check is self-contained and
/// records a pass/fail flag plus a short detail string.
std::vector<CriterionResult> run_reference_battery();

/// Render one table line per criterion ("PASS  3  ...").
std::string format_battery_line(const CriterionResult& r);

}  // namespace bilap
