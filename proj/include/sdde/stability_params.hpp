#ifndef SDDE_STABILITY_PARAMS_HPP
#define SDDE_STABILITY_PARAMS_HPP

namespace sdde::analysis {

// Decay/growth constants of the two-sided energy conditions used by the
// stability theory, plus the delay data they are paired with.
//
// lambda1/lambda2 bound the Lipschitz coefficient pair, lambda3/lambda4 the
// super-linear pair; weight_o is the Young-inequality weight (0 and infinity
// are allowed with the usual degenerate conventions); epsilon is the slack
// used by the discrete rate equation.
struct StabilityParams {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    double lambda4 = 0.0;
    double delta_bar = 0.0; // delay-derivative bound, in [0, 1)
    double tau = 0.0;       // delay supremum
    double weight_o = 0.0;  // in [0, +inf]
    double epsilon = 0.0;   // margin, > 0

    // Throws RejectedInputError when the ordering or margin constraints fail.
    void validate() const;

    // Upper bound on admissible epsilon: [l1 - 2*l3 - (1-db)*(l2+l4)] / 2.
    double epsilon_limit() const;
};

} // namespace sdde::analysis

#endif // SDDE_STABILITY_PARAMS_HPP
