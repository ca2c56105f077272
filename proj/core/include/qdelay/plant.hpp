#pragma once

#include <string>

#include "qdelay/matrix.hpp"

namespace qdelay {

struct SingularDetectorAngleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The symplectic form [[0,1],[-1,0]].
const Mat& sigma();

/// Physical plant data: Hamiltonian quadratic form, coupling row, drive vector.
struct PlantSpec {
    Mat hamiltonian;   // G, 2x2 real symmetric
    CMat coupling;     // C, 1x2 complex row
    Mat drive;         // B, 2x1 real
    std::string label;
};

/// Full synthesis-form state-space tuple at a fixed detector angle and delay.
struct SynthesisModel {
    double phi = 0.0;
    Mat a;       // 2x2
    Mat b1;      // 2x2
    Mat b2;      // 2x1
    Mat c1;      // 2x2
    Mat c2;      // 1x2
    Mat d12;     // 2x1
    Mat d21;     // 1x2
    Mat s_phi;   // 2x2 symmetric PSD
    double e1 = 0.0;
    double e2 = 0.0;
    double h = 0.0;
};

struct AssumptionReport {
    bool stabilizable = false;
    bool detectable = false;
    bool no_imaginary_axis_zeros_12 = false;
    bool no_imaginary_axis_zeros_21 = false;
    bool e1_nonsingular = false;
    bool e2_nonsingular = false;
    std::string details;

    bool pass() const {
        return stabilizable && detectable && no_imaginary_axis_zeros_12 &&
               no_imaginary_axis_zeros_21 && e1_nonsingular && e2_nonsingular;
    }
};

enum class Stability { Stable, Marginal, Unstable };

std::string to_string(Stability s);

Mat default_c1();   // identity
Mat default_d12();  // [1,1]^T

/// Build the synthesis-form model from physical data. phi must stay clear of
/// pi/2 and 3pi/2 where the noise-drive formula blows up.
SynthesisModel build_synthesis_model(const PlantSpec& plant, double phi,
                                     const Mat& c1, const Mat& d12, double h);

SynthesisModel build_synthesis_model(const PlantSpec& plant, double phi,
                                     double h);

Stability classify_stability(const Mat& a, double eps = 1e-9);

AssumptionReport check_assumptions(const SynthesisModel& model);

/// Damped cavity with an on-threshold parametric down converter.
PlantSpec preset_damped_cavity(double gamma, double delta);

/// Single particle trapped in a harmonic potential, position coupling.
PlantSpec preset_harmonic(double mass, double omega);

/// S_phi = [[1, sin phi], [sin phi, 1]].
Mat noise_covariance(double phi);

bool is_admissible_phi(double phi, double margin = 1e-6);

// JSON round trip. Complex numbers serialize as [re, im] pairs.
std::string to_json(const PlantSpec& plant);
PlantSpec plant_from_json(const std::string& text);
std::string to_json(const SynthesisModel& model);
SynthesisModel model_from_json(const std::string& text);

}  // namespace qdelay
