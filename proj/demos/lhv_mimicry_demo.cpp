// The local model reproduces every postselected quantum cell at one phase pair.
#include <cstdio>

#include <timebin/timebin.hpp>

int main()
{
    using namespace timebin;
    const Phase a(0.6), b(1.9);
    const auto lhv_table = lhv::lhv_table_oracle(a, b, 1 << 16);
    const auto qm_table = quantum::joint_table(quantum::StateModel(1.0), a, b);
    std::printf("%-6s %-6s %12s %12s\n", "Alice", "Bob", "LHV", "quantum");
    for (std::size_t i = 0; i < outcome_count; ++i)
        for (std::size_t j = 0; j < outcome_count; ++j)
            std::printf("%-6s %-6s %12.8f %12.8f\n", to_string(SlotSign::from_index(i)).c_str(),
                        to_string(SlotSign::from_index(j)).c_str(), lhv_table.p[i][j], qm_table.p[i][j]);
    std::printf("max deviation %.3e\n", lhv_table.max_abs_difference(qm_table));
}
