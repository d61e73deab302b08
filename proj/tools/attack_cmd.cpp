#include <algorithm>
#include <cmath>

#include "commands.hpp"
#include "rijndael/partial_sums.hpp"

using nlohmann::json;
using namespace rijndael;

namespace cli {

namespace {

int refuse(Options const& opt, AttackPlan const& plan, double estimate, std::string const& reason) {
    emit(opt, {{"refused", true},
               {"reason", reason},
               {"estimate_log2", estimate},
               {"budget_log2", opt.budget_log2},
               {"plan", to_json(plan)}});
    return kExitBudget;
}

}  // namespace

int cmd_attack(Options const& opt) {
    auto const params = CipherParams::from_bits(opt.block_bits, opt.key_bits != 0 ? opt.key_bits : 128);
    int const rounds = opt.rounds != 0 ? opt.rounds : 6;

    if (rounds == 4) {
        if (!opt.property_file.empty()) throw UsageError("the 4-round attack uses its own first-order structures");
        int const structures = opt.structures != 0 ? opt.structures : 3;
        auto const plan = plan_attack(params, rounds, structures);
        if (plan.time_log2 > opt.budget_log2) return refuse(opt, plan, plan.time_log2, "projected work exceeds the budget");
        auto const r = run_attack_4round_bytewise(params, opt.seed, structures);
        json report{{"attack", to_json(r)}, {"plan", to_json(plan)}};
        emit(opt, report);
        return r.recovered_all ? kExitPass : kExitFail;
    }

    AttackOptions ao;
    ao.structures = opt.structures != 0 ? opt.structures : 6;
    ao.threads = opt.threads;
    ao.progress = progress_printer(opt.progress);

    AttackPlan plan;
    if (!opt.property_file.empty()) {
        auto prop = load_property(opt.property_file);
        if (prop.params.block_cols() != params.block_cols())
            throw UsageError("descriptor is for " + std::to_string(prop.params.block_bits()) + "-bit blocks");
        if (prop.rounds + 2 != rounds)
            throw UsageError("a " + std::to_string(prop.rounds) + "-round distinguisher attacks " +
                             std::to_string(prop.rounds + 2) + " rounds");
        plan = plan_for_property(prop, ao.structures);
        plan.params = params.with_rounds(rounds);
        ao.property = std::move(prop);
    } else {
        plan = plan_attack(params, rounds, ao.structures);
        if (rounds == 5) ao.property = builtin_first_order_property(params);
    }

    double const estimate = std::max(plan.time_log2, engine_lookups_log2(plan));
    if (estimate > opt.budget_log2) return refuse(opt, plan, estimate, "projected work exceeds the budget");
    if (!plan.executable) return refuse(opt, plan, estimate, "configuration is estimated only");

    auto const r = run_attack_6round(params, opt.seed, ao);
    json report{{"attack", to_json(r)}, {"plan", to_json(plan)}};
    emit(opt, report);
    return r.true_key_found ? kExitPass : kExitFail;
}

}  // namespace cli
