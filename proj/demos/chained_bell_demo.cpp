// Predict, simulate and analyze a short N = 4 chained Bell test.
#include <iostream>

#include <timebin/timebin.hpp>

int main()
{
    using namespace timebin;
    const int n = 4;
    const Prediction p = predict(n, 0.99);
    std::cout << "N=" << n << "  S_QM=" << p.s_qm << "  V*S_QM=" << p.expected << "  bound=" << p.s_lhv << "  ("
              << p.verdict() << ")\n";

    ExperimentConfig cfg;
    cfg.seed = 42;
    cfg.pair_prob_per_pulse = 0.01; // brighter than the default source to keep the demo short
    const auto settings = optimal_chained_settings(n);
    const auto plan = build_run_plan(settings, Functional::chsh, 0.5);
    const auto streams = sim::simulate_plan(cfg, plan);
    const auto result = analysis::full_pipeline(streams, settings);

    std::cout << analysis::table1_csv(result);
    for (const auto& t : result.terms)
        std::cout << term_name(t.term) << "  E=" << t.correlation.value << " +- " << t.correlation.std_error << '\n';
}
