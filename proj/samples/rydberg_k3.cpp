// Optimizes the three-atom Rydberg chain at T = 0.141 us, then runs the
// staged protocol and the master equation on the optimized field.
#include <cstdio>

#include "xxgraph/xxgraph.hpp"

int main() {
    using namespace xxgraph;
    const auto constants = default_constants();
    const ChainGeometry chain = ChainGeometry::regular(3, constants);

    GrapeConfig config;
    config.model = RydbergModel{chain};
    config.sites = 3;
    config.duration = 0.141;
    config.guess.amplitude = constants.guess_amplitude;
    const StateVector psi0 = plus_product_state(3, 1.0);
    const GrapeResult result = optimize(config, psi0);
    std::printf("closed system: population %.6f after %d iterations (start %d)\n", result.final_population,
                result.iterations, result.start_index);

    const auto rho0 = DensityMatrix::pure(lift_to_ground_basis(psi0, 3));
    const auto target = lift_to_ground_basis(complete_graph_state(3), 3);
    const MasterResult open = evolve_master(config.model, result.schedule, JumpChannels::rydberg_default(constants),
                                            rho0, target, {.checkpoints = CheckpointValidation::Final});
    std::printf("with decay:    population %.6f (delta %.6f)\n", open.populations.back(),
                result.final_population - open.populations.back());

    const ProtocolResult staged = run_full_protocol(ProtocolPlan::standard(chain, result.schedule, constants), false);
    std::printf("staged run:    psi1 %.5f psi2 %.5f psi3 %.5f psi4 %.5f, t_tot = %.5f us\n",
                staged.boundary_population(0), staged.boundary_population(1), staged.boundary_population(2),
                staged.boundary_population(3), staged.total_duration);
    return 0;
}
