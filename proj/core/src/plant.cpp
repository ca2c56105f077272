#include "qdelay/plant.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "qdelay/care.hpp"
#include "qdelay/linalg.hpp"

namespace qdelay {

using json = nlohmann::json;
using cplx = std::complex<double>;

const Mat& sigma() {
    static const Mat s{{0.0, 1.0}, {-1.0, 0.0}};
    return s;
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Marginal: return "marginal";
        case Stability::Unstable: return "unstable";
    }
    return "?";
}

Mat default_c1() { return Mat::identity(2); }
Mat default_d12() { return Mat::col({1.0, 1.0}); }

Mat noise_covariance(double phi) {
    double sp = std::sin(phi);
    return Mat{{1.0, sp}, {sp, 1.0}};
}

bool is_admissible_phi(double phi, double margin) {
    constexpr double pi = std::numbers::pi;
    double p = std::fmod(phi, 2.0 * pi);
    if (p < 0.0) p += 2.0 * pi;
    return std::abs(p - pi / 2.0) > margin && std::abs(p - 3.0 * pi / 2.0) > margin;
}

SynthesisModel build_synthesis_model(const PlantSpec& plant, double phi,
                                     const Mat& c1, const Mat& d12, double h) {
    const Mat& g = plant.hamiltonian;
    if (!g.is_square() || g.rows() != 2)
        throw DimensionError("plant Hamiltonian must be 2x2");
    if (std::abs(g(0, 1) - g(1, 0)) > 1e-14 * std::max(1.0, g.max_abs()))
        throw DomainError("plant Hamiltonian matrix must be symmetric");
    if (!g.all_finite() || !plant.drive.all_finite())
        throw DomainError("plant data must be finite");
    if (!is_admissible_phi(phi))
        throw SingularDetectorAngleError(
            "detector angle too close to pi/2 or 3pi/2");
    if (h < 0.0) throw DomainError("delay h must be nonnegative");

    const CMat& c = plant.coupling;
    if (c.rows() != 1 || c.cols() != 2)
        throw DimensionError("coupling row must be 1x2");

    SynthesisModel m;
    m.phi = phi;
    m.h = h;
    m.a = sigma() * (g + (c.adjoint() * c).imag());
    m.b2 = plant.drive;
    m.c1 = c1;
    m.d12 = d12;
    m.d21 = Mat::row({1.0, 0.0});
    m.s_phi = noise_covariance(phi);

    // B1 = Sigma Im(C^dag [1/cos(phi), -tan(phi) + i]), the simplified form
    // of the noise-drive column expression.
    double cp = std::cos(phi);
    CMat row{{cplx(1.0 / cp, 0.0), cplx(-std::tan(phi), 1.0)}};
    m.b1 = sigma() * (c.adjoint() * row).imag();

    // C2 = e^{-i phi} C + e^{i phi} C^*: real by construction.
    CMat c2c = cplx(std::cos(phi), -std::sin(phi)) * c +
               cplx(std::cos(phi), std::sin(phi)) * c.conj();
    if (c2c.imag().max_abs() > 1e-12 * std::max(1.0, c2c.norm()))
        throw DomainError("measurement row came out complex");
    m.c2 = c2c.real();

    m.e1 = (d12.transpose() * d12)(0, 0);
    m.e2 = quad_form(m.d21, m.s_phi, m.d21.transpose());
    return m;
}

SynthesisModel build_synthesis_model(const PlantSpec& plant, double phi,
                                     double h) {
    return build_synthesis_model(plant, phi, default_c1(), default_d12(), h);
}

Stability classify_stability(const Mat& a, double eps) {
    bool any_pos = false, all_neg = true;
    for (auto lam : eigenvalues(a)) {
        if (lam.real() > eps) any_pos = true;
        if (lam.real() >= -eps) all_neg = false;
    }
    if (any_pos) return Stability::Unstable;
    return all_neg ? Stability::Stable : Stability::Marginal;
}

namespace {

// PBH test: rank [A - lambda I, B] at every closed-right-half-plane mode.
bool pbh_full_rank(const Mat& a, const Mat& b, double eps = 1e-9) {
    const int n = a.rows();
    for (auto lam : eigenvalues(a)) {
        if (lam.real() < -eps) continue;
        CMat pencil(n, n + b.cols());
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                pencil(i, j) = cplx(a(i, j), 0.0) - (i == j ? lam : cplx(0.0));
            for (int j = 0; j < b.cols(); ++j)
                pencil(i, n + j) = b(i, j);
        }
        if (rank(pencil) < n) return false;
    }
    return true;
}

bool no_imaginary_axis_eigs(const Mat& m, double eps = 1e-8) {
    for (auto lam : eigenvalues(m))
        if (std::abs(lam.real()) <= eps) return false;
    return true;
}

}  // namespace

AssumptionReport check_assumptions(const SynthesisModel& model) {
    AssumptionReport rep;
    rep.stabilizable = pbh_full_rank(model.a, model.b2);
    rep.detectable = pbh_full_rank(model.a.transpose(), model.c2.transpose());

    rep.e1_nonsingular = std::abs(model.e1) > 1e-12;
    rep.e2_nonsingular = std::abs(model.e2) > 1e-12;

    if (rep.e1_nonsingular) {
        CareProblem ctrl{model.a, model.b2, model.c1.transpose() * model.c1,
                         model.c1.transpose() * model.d12, model.e1};
        rep.no_imaginary_axis_zeros_12 =
            no_imaginary_axis_eigs(care_hamiltonian(ctrl));
    }
    if (rep.e2_nonsingular) {
        Mat qf = model.b1 * model.s_phi * model.b1.transpose();
        Mat nf = model.b1 * model.s_phi * model.d21.transpose();
        CareProblem filt{model.a.transpose(), model.c2.transpose(), qf, nf,
                         model.e2};
        rep.no_imaginary_axis_zeros_21 =
            no_imaginary_axis_eigs(care_hamiltonian(filt));
    }

    std::ostringstream d;
    d << "stabilizable=" << rep.stabilizable
      << " detectable=" << rep.detectable
      << " rank12=" << rep.no_imaginary_axis_zeros_12
      << " rank21=" << rep.no_imaginary_axis_zeros_21
      << " E1=" << rep.e1_nonsingular << " E2=" << rep.e2_nonsingular;
    rep.details = d.str();
    return rep;
}

PlantSpec preset_damped_cavity(double gamma, double delta) {
    if (!(gamma > 0.0) || !(delta > 0.0))
        throw DomainError("damped cavity parameters must be positive");
    PlantSpec p;
    p.hamiltonian = Mat{{0.0, gamma}, {gamma, 0.0}};
    p.coupling = CMat{{cplx(delta, 0.0), cplx(0.0, delta)}};
    p.drive = Mat::col({0.0, 1.0});
    std::ostringstream lbl;
    lbl << "damped-cavity(gamma=" << gamma << ",delta=" << delta << ")";
    p.label = lbl.str();
    return p;
}

PlantSpec preset_harmonic(double mass, double omega) {
    if (!(mass > 0.0) || !(omega > 0.0))
        throw DomainError("harmonic oscillator parameters must be positive");
    PlantSpec p;
    p.hamiltonian = Mat{{mass * omega * omega, 0.0}, {0.0, 1.0 / mass}};
    p.coupling = CMat{{cplx(1.0, 0.0), cplx(0.0, 0.0)}};
    p.drive = Mat::col({0.0, 1.0});
    std::ostringstream lbl;
    lbl << "harmonic(m=" << mass << ",omega=" << omega << ")";
    p.label = lbl.str();
    return p;
}

namespace {

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Mat mat_from_json(const json& j) {
    int r = static_cast<int>(j.size());
    int c = r ? static_cast<int>(j[0].size()) : 0;
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
    return m;
}

json cmat_to_json(const CMat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

CMat cmat_from_json(const json& j) {
    int r = static_cast<int>(j.size());
    int c = r ? static_cast<int>(j[0].size()) : 0;
    CMat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int k = 0; k < c; ++k)
            m(i, k) = cplx(j[i][k][0].get<double>(), j[i][k][1].get<double>());
    return m;
}

}  // namespace

std::string to_json(const PlantSpec& plant) {
    json j;
    j["label"] = plant.label;
    j["G"] = mat_to_json(plant.hamiltonian);
    j["C"] = cmat_to_json(plant.coupling);
    j["B"] = mat_to_json(plant.drive);
    return j.dump(2);
}

PlantSpec plant_from_json(const std::string& text) {
    json j = json::parse(text);
    PlantSpec p;
    p.label = j.value("label", "");
    p.hamiltonian = mat_from_json(j.at("G"));
    p.coupling = cmat_from_json(j.at("C"));
    p.drive = mat_from_json(j.at("B"));
    return p;
}

std::string to_json(const SynthesisModel& m) {
    json j;
    j["phi"] = m.phi;
    j["h"] = m.h;
    j["A"] = mat_to_json(m.a);
    j["B1"] = mat_to_json(m.b1);
    j["B2"] = mat_to_json(m.b2);
    j["C1"] = mat_to_json(m.c1);
    j["C2"] = mat_to_json(m.c2);
    j["D12"] = mat_to_json(m.d12);
    j["D21"] = mat_to_json(m.d21);
    j["S_phi"] = mat_to_json(m.s_phi);
    j["E1"] = m.e1;
    j["E2"] = m.e2;
    return j.dump(2);
}

SynthesisModel model_from_json(const std::string& text) {
    json j = json::parse(text);
    SynthesisModel m;
    m.phi = j.at("phi").get<double>();
    m.h = j.at("h").get<double>();
    m.a = mat_from_json(j.at("A"));
    m.b1 = mat_from_json(j.at("B1"));
    m.b2 = mat_from_json(j.at("B2"));
    m.c1 = mat_from_json(j.at("C1"));
    m.c2 = mat_from_json(j.at("C2"));
    m.d12 = mat_from_json(j.at("D12"));
    m.d21 = mat_from_json(j.at("D21"));
    m.s_phi = mat_from_json(j.at("S_phi"));
    m.e1 = j.at("E1").get<double>();
    m.e2 = j.at("E2").get<double>();
    return m;
}

}  // namespace qdelay
