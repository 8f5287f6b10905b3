#pragma once

namespace hypflat {

// Global tolerance policy. Structural checks (det = 1, tangency, unit norms)
// default to 1e-10 relative; chart_eps guards the reflected diagonal where
// the metric denominators degenerate.
struct Tolerance {
    double structural   = 1e-10;  // det/tangency/unit invariants
    double map_det      = 1e-12;  // |det a - 1| for Moebius maps
    double chart_eps    = 1e-8;   // lower bound on |1 + mu1*conj(mu2)|
    double acosh_clamp  = 1e-9;   // allowed dip of -<p,q> below 1 before error
    double null_analytic = 1e-8;  // null/causal test, analytic derivatives
    double null_fd      = 1e-5;   // null/causal test, finite differences
    double reg_tol      = 1e-10;  // |dmu1|+|dmu2| regularity floor
    double fit_tol      = 1e-4;   // Massey |P-|Q||/P exp-type threshold
    double umb_tol      = 1e-9;   // umbilic |H| threshold
    double frenet_tol   = 1e-6;   // kappa floor below which torsion is undefined
    double lambda_floor = 1e-12;  // node excluded as singular below this
};

inline Tolerance& tolerance() {
    static Tolerance t;
    return t;
}

}  // namespace hypflat
