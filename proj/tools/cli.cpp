#include "cli.hpp"

#include "stakepool/equilibrium.hpp"
#include "stakepool/errors.hpp"
#include "stakepool/report.hpp"
#include "stakepool/scenario.hpp"
#include "stakepool/sybil.hpp"
#include "stakepool/verify.hpp"
#include "stakepool/welfare.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef STAKEPOOL_VERSION
#define STAKEPOOL_VERSION "0.0.0"
#endif

namespace stakepool::cli {

namespace {

struct RunConfig {
    std::string scenario_path;
    std::string scheme;
    std::uint64_t seed = 42;
    std::uint64_t samples = 1'000'000;
    double tol = default_tolerance;
    std::string format = "table";
    std::size_t max_enum = 10;
    std::size_t max_opt = 20;

    // subcommand specific
    std::optional<std::string> l;
    double slack = 0;
    std::string pos_mode = "exhaustive";
    long player = 0;
    long grid = 200;
    std::vector<std::string> stakes;
    std::string budget;
    std::vector<int> criteria;
};

struct Loaded {
    Scenario scenario;
    std::string hash;
};

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return out.str();
}

Loaded load(const RunConfig& cfg) {
    std::ifstream in(cfg.scenario_path, std::ios::binary);
    if (!in) throw InputError("cannot read scenario file '" + cfg.scenario_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    return {parse_scenario(text, cfg.tol), sha256_hex(text)};
}

Scheme scheme_of(const RunConfig& cfg, const Scenario* scenario) {
    if (!cfg.scheme.empty()) return parse_scheme(cfg.scheme);
    if (scenario && scenario->scheme) return *scenario->scheme;
    return Scheme::shapley;
}

RewardOptions reward_options(const RunConfig& cfg) {
    RewardOptions r;
    r.samples = cfg.samples;
    r.seed = cfg.seed;
    return r;
}

class Printer {
public:
    Printer(std::ostream& out, Format format) : out_(out), format_(format) {}

    std::string num(const Scalar& x) const { return format_number(x, format_); }
    void table(const Table& t) { write_table(out_, t, format_); }

    void metadata(const std::string& command, const std::string& hash, const RunConfig& cfg,
                  std::optional<Scheme> scheme) {
        Table t{"metadata", {"key", "value"}, {}};
        t.add({"tool", std::string("stakepool ") + STAKEPOOL_VERSION});
        t.add({"command", command});
        t.add({"scenario_sha256", hash});
        if (scheme) t.add({"scheme", std::string(to_string(*scheme))});
        t.add({"seed", std::to_string(cfg.seed)});
        t.add({"samples", std::to_string(cfg.samples)});
        t.add({"tolerance", Scalar::real(cfg.tol).decimal(12)});
        table(t);
    }

    void partition(const std::string& title, const Partition& p, const GameSpec& game) {
        Table t{title, {"pool", "atomic", "oceanic", "stake", "winning"}, {}};
        for (std::size_t j = 0; j < p.pools.size(); ++j) {
            std::string ids;
            for (std::size_t m = 0; m < p.pools[j].atomic.size(); ++m)
                ids += (m ? " " : "") + std::to_string(p.pools[j].atomic[m] + 1);
            Scalar stake = pool_stake(p.pools[j], game);
            t.add({std::to_string(j + 1), ids, num(p.pools[j].oceanic), num(stake),
                   is_winning(stake, game.threshold(), game.tolerance()) ? "yes" : "no"});
        }
        table(t);
    }

    void conditions(const ConditionReport& report) {
        Table t{"conditions", {"condition", "pass", "detail"}, {}};
        for (const auto& c : report.conditions) t.add({c.name, c.pass ? "yes" : "no", c.detail});
        t.add({"verdict", report.pass() ? "yes" : "no", report.verdict});
        table(t);
    }

private:
    std::ostream& out_;
    Format format_;
};

const Partition& require_partition(const Scenario& s) {
    if (!s.partition) throw InputError("scenario has no partition");
    return *s.partition;
}

std::string mover(const Deviation& d) {
    if (d.who.kind == Mover::Kind::atomic) return "player " + std::to_string(d.who.id + 1);
    return "ocean of pool " + std::to_string(d.who.id + 1);
}

int cmd_rewards(const RunConfig& cfg, Printer& pr) {
    Loaded in = load(cfg);
    const Scheme scheme = scheme_of(cfg, &in.scenario);
    const GameSpec& game = in.scenario.game;
    const Partition& partition = require_partition(in.scenario);
    RewardAllocation alloc = allocate_rewards(partition, game, scheme, reward_options(cfg));
    pr.metadata("rewards", in.hash, cfg, scheme);
    Table players{"players", {"player", "pool", "stake", "reward", "stderr"}, {}};
    Table pools{"pools", {"pool", "stake", "winning", "oceanic", "oceanic_rate", "method"}, {}};
    for (std::size_t p = 0; p < partition.pools.size(); ++p) {
        const Pool& pool = partition.pools[p];
        const PoolRewards& r = alloc.pools[p];
        for (std::size_t j = 0; j < pool.atomic.size(); ++j) {
            PlayerId i = pool.atomic[j];
            players.add({std::to_string(i + 1), std::to_string(p + 1), pr.num(game.stake(i)), pr.num(alloc.atomic[i]),
                         pr.num(Scalar::real(r.uncertainty(j)))});
        }
        Scalar stake = pool_stake(pool, game);
        pools.add({std::to_string(p + 1), pr.num(stake), is_winning(stake, game.threshold(), game.tolerance()) ? "yes" : "no",
                   pr.num(pool.oceanic), pr.num(alloc.oceanic_rate[p]), std::string(to_string(r.method))});
    }
    std::sort(players.rows.begin(), players.rows.end(),
              [](const auto& x, const auto& y) { return std::stol(x[0]) < std::stol(y[0]); });
    pr.table(players);
    pr.table(pools);
    return ok;
}

int cmd_check(const RunConfig& cfg, Printer& pr) {
    Loaded in = load(cfg);
    const Scheme scheme = scheme_of(cfg, &in.scenario);
    NashOptions opts{reward_options(cfg), false};
    NashReport report = check_nash(require_partition(in.scenario), in.scenario.game, scheme, opts);
    pr.metadata("equilibrium check", in.hash, cfg, scheme);
    Table verdict{"verdict", {"equilibrium", "statistical", "deviations"}, {}};
    verdict.add({report.equilibrium ? "NE" : "not NE", report.statistical ? "yes" : "no",
                 std::to_string(report.deviations.size())});
    pr.table(verdict);
    Table dev{"deviations", {"mover", "from", "to", "before", "after", "statistical"}, {}};
    for (const auto& d : report.deviations)
        dev.add({mover(d), std::to_string(d.from + 1), d.to ? std::to_string(*d.to + 1) : "new", pr.num(d.before),
                 pr.num(d.after), d.statistical ? "yes" : "no"});
    pr.table(dev);
    return ok;
}

int cmd_construct(const RunConfig& cfg, Printer& pr) {
    Loaded in = load(cfg);
    const Scheme scheme = scheme_of(cfg, &in.scenario);
    const GameSpec& game = in.scenario.game;
    Partition partition;
    std::optional<ConditionReport> conditions;
    Table params{"construction", {"key", "value"}, {}};
    if (scheme == Scheme::shapley && game.has_ocean()) {
        std::optional<Scalar> l;
        if (cfg.l) l = parse_scalar(*cfg.l);
        OceanicConstruction built = construct_oceanic_equilibrium(game, l, cfg.slack);
        partition = built.partition;
        conditions = oceanic_kl_conditions(built.params, game);
        params.add({"rule", "one large player per pool with k_i = sqrt(l (h - a_i))"});
        params.add({"l", pr.num(built.params.l)});
        params.add({"requested_l", pr.num(built.requested_l)});
        params.add({"pure_pools", std::to_string(built.pure_pools)});
    } else if (scheme == Scheme::shapley || scheme == Scheme::prop_sqrt) {
        AtomicConstruction built = scheme == Scheme::shapley ? construct_atomic_kl_equilibrium(game)
                                                             : construct_sqrt_kl_equilibrium(game);
        partition = built.partition;
        TwoValued tv = two_valued_stakes(game);
        conditions = scheme == Scheme::shapley
                         ? atomic_kl_conditions(built.k, built.l, tv.a, game.threshold(), tv.large.size())
                         : sqrt_kl_conditions(built.k, built.l, tv.a, game.threshold());
        params.add({"rule", built.rule});
        params.add({"k", std::to_string(built.k)});
        params.add({"l", std::to_string(built.l)});
        if (scheme == Scheme::shapley) params.add({"single_point", built.single_point ? "yes" : "no"});
    } else if (scheme == Scheme::proportional) {
        partition = construct_leximin_optimal(game, cfg.max_opt);
        params.add({"rule", "leximin over maximum-W partitions"});
    } else {
        throw PremiseError("no equilibrium construction for prop_squares");
    }
    NashReport ne = check_nash(partition, game, scheme, {reward_options(cfg), true});
    pr.metadata("equilibrium construct", in.hash, cfg, scheme);
    params.add({"partition", describe(partition)});
    params.add({"check_nash", ne.equilibrium ? "NE" : "not NE"});
    pr.table(params);
    pr.partition("partition", partition, game);
    if (conditions) pr.conditions(*conditions);
    return ok;
}

void opt_rows(Table& t, const OptResult& r) {
    t.add({"opt", std::to_string(r.value)});
    t.add({"bound_only", r.bound_only ? "yes" : "no"});
    if (r.witness) t.add({"witness", describe(*r.witness)});
}

int cmd_opt(const RunConfig& cfg, Printer& pr) {
    Loaded in = load(cfg);
    OptResult r = opt(in.scenario.game, cfg.max_opt);
    pr.metadata("opt", in.hash, cfg, std::nullopt);
    Table t{"opt", {"key", "value"}, {}};
    opt_rows(t, r);
    pr.table(t);
    return ok;
}

int cmd_pos(const RunConfig& cfg, Printer& pr) {
    Loaded in = load(cfg);
    const Scheme scheme = scheme_of(cfg, &in.scenario);
    PoSOptions opts{cfg.max_enum, cfg.max_opt, {reward_options(cfg), true}};
    PoSReport r = price_of_stability(in.scenario.game, scheme, parse_pos_mode(cfg.pos_mode), opts);
    pr.metadata("pos", in.hash, cfg, scheme);
    Table t{"price of stability", {"opt", "best_equilibrium_w", "pos", "method", "upper_bound", "equilibria", "note"}, {}};
    t.add({std::to_string(r.opt.value) + (r.opt.bound_only ? " (bound)" : ""), std::to_string(r.best_equilibrium_w),
           r.pos ? pr.num(*r.pos) : "undefined", std::string(to_string(r.mode)), r.upper_bound ? "yes" : "no",
           std::to_string(r.equilibria), r.note});
    pr.table(t);
    if (r.witness) pr.partition("equilibrium witness", *r.witness, in.scenario.game);
    if (r.opt.witness) pr.partition("opt witness", *r.opt.witness, in.scenario.game);
    return ok;
}

SybilOptions sybil_options(const RunConfig& cfg) {
    SybilOptions s;
    s.rewards = reward_options(cfg);
    s.grid = cfg.grid;
    return s;
}

void print_audits(const std::vector<SybilAudit>& audits, Printer& pr) {
    Table t{"sybil audit", {"player", "baseline", "best", "gain", "verdict", "method", "noise"}, {}};
    Table w{"witness strategies", {"player", "pool", "stake"}, {}};
    for (const auto& a : audits) {
        t.add({std::to_string(a.player + 1), pr.num(a.baseline), pr.num(a.best), pr.num(a.best - a.baseline),
               std::string(to_string(a.verdict)), a.method, pr.num(Scalar::real(a.noise))});
        if (a.verdict == SybilVerdict::sybil_proof) continue;
        for (const auto& [pool, s] : a.strategy.allocations)
            w.add({std::to_string(a.player + 1), std::to_string(pool + 1), pr.num(s)});
    }
    pr.table(t);
    pr.table(w);
}

int cmd_sybil_audit(const RunConfig& cfg, Printer& pr) {
    Loaded in = load(cfg);
    const Scheme scheme = scheme_of(cfg, &in.scenario);
    auto audits = audit_sybil_proofness(in.scenario.game, require_partition(in.scenario), scheme, sybil_options(cfg));
    pr.metadata("sybil audit", in.hash, cfg, scheme);
    print_audits(audits, pr);
    return ok;
}

int cmd_sybil_best(const RunConfig& cfg, Printer& pr) {
    Loaded in = load(cfg);
    const Scheme scheme = scheme_of(cfg, &in.scenario);
    if (cfg.player < 1 || static_cast<std::size_t>(cfg.player) > in.scenario.game.player_count())
        throw InputError("--player must name an atomic player (1-based)");
    auto audit = sybil_best_response(in.scenario.game, require_partition(in.scenario),
                                     static_cast<PlayerId>(cfg.player - 1), scheme, sybil_options(cfg));
    pr.metadata("sybil best-response", in.hash, cfg, scheme);
    print_audits({audit}, pr);
    return ok;
}

int cmd_waterfill(const RunConfig& cfg, Printer& pr) {
    std::vector<Scalar> stakes;
    for (const auto& s : cfg.stakes) stakes.push_back(parse_scalar(s));
    const Scalar budget = parse_scalar(cfg.budget);
    Waterfill w = waterfill_proportional(stakes, budget);
    std::string input;
    for (const auto& s : cfg.stakes) input += s + ",";
    pr.metadata("sybil waterfill", sha256_hex(input + "budget=" + cfg.budget), cfg, Scheme::proportional);
    Table t{"allocation", {"pool", "stake", "allocation", "payoff"}, {}};
    for (std::size_t j = 0; j < stakes.size(); ++j) {
        Scalar part = w.allocation[j].sign() > 0 ? w.allocation[j] / (stakes[j] + w.allocation[j]) : Scalar(0);
        t.add({std::to_string(j + 1), pr.num(stakes[j]), pr.num(w.allocation[j]), pr.num(part)});
    }
    t.add({"total", "", pr.num(budget), pr.num(w.payoff)});
    pr.table(t);
    return ok;
}

int cmd_verify(const RunConfig& cfg, Printer& pr, std::ostream& err) {
    verify::VerifyOptions opts{cfg.seed, cfg.samples};
    pr.metadata("verify", "none", cfg, std::nullopt);
    auto results = verify::run_acceptance(opts, cfg.criteria, [&](const verify::CriterionResult& r) {
        err << "criterion " << r.id << ": " << (r.pass ? "PASS" : "FAIL") << '\n';
    });
    Table t{"acceptance", {"criterion", "result", "title", "measured"}, {}};
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        t.add({std::to_string(r.id), r.pass ? "PASS" : "FAIL", r.title, r.measured});
    }
    pr.table(t);
    return all ? ok : verification_failed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Stake pool formation games: rewards, equilibria, welfare and Sybil analysis", "stakepool"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--scheme", cfg.scheme, "shapley, proportional, prop_squares or prop_sqrt");
    app.add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
    app.add_option("--samples", cfg.samples, "Monte Carlo samples")->capture_default_str();
    app.add_option("--tol", cfg.tol, "comparison tolerance")->capture_default_str();
    app.add_option("--format", cfg.format, "table or csv")->capture_default_str();
    app.add_option("--max-enum", cfg.max_enum, "player cap for equilibrium enumeration")->capture_default_str();
    app.add_option("--max-opt", cfg.max_opt, "player cap for the exact OPT solver")->capture_default_str();

    auto scenario_arg = [&](CLI::App* sub) { sub->add_option("scenario", cfg.scenario_path, "scenario JSON")->required(); };

    auto* rewards = app.add_subcommand("rewards", "rewards of every player in the scenario partition");
    scenario_arg(rewards);

    auto* eq = app.add_subcommand("equilibrium", "check or construct equilibria");
    eq->require_subcommand(1);
    auto* check = eq->add_subcommand("check", "test the scenario partition for profitable deviations");
    scenario_arg(check);
    auto* construct = eq->add_subcommand("construct", "build an equilibrium for the scenario game");
    scenario_arg(construct);
    construct->add_option("--l", cfg.l, "pure-ocean pool size (oceanic Shapley)");
    construct->add_option("--slack", cfg.slack, "accepted growth of l when the ocean does not divide");

    auto* optc = app.add_subcommand("opt", "maximum number of winning pools");
    scenario_arg(optc);

    auto* pos = app.add_subcommand("pos", "price of stability");
    scenario_arg(pos);
    pos->add_option("--mode", cfg.pos_mode, "exhaustive, by-type or constructive")->capture_default_str();

    auto* sybil = app.add_subcommand("sybil", "Sybil strategies");
    sybil->require_subcommand(1);
    auto* audit = sybil->add_subcommand("audit", "best Sybil split of every atomic player");
    scenario_arg(audit);
    audit->add_option("--grid", cfg.grid, "grid steps per player stake")->capture_default_str();
    auto* best = sybil->add_subcommand("best-response", "best Sybil split of one player");
    scenario_arg(best);
    best->add_option("--player", cfg.player, "player id (1-based)")->required();
    best->add_option("--grid", cfg.grid, "grid steps per player stake")->capture_default_str();
    auto* wf = sybil->add_subcommand("waterfill", "optimal proportional split over pools");
    wf->add_option("--stakes", cfg.stakes, "pool stakes")->required()->delimiter(',');
    wf->add_option("--budget", cfg.budget, "stake to split")->required();

    auto* ver = app.add_subcommand("verify", "run the acceptance suite");
    ver->add_option("--criteria", cfg.criteria, "subset of criteria, e.g. 1,3")->delimiter(',');

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    }

    try {
        Printer pr(out, parse_format(cfg.format));
        if (cfg.tol <= 0) throw InputError("--tol must be positive");
        if (cfg.samples == 0) throw InputError("--samples must be positive");
        if (*rewards) return cmd_rewards(cfg, pr);
        if (*check) return cmd_check(cfg, pr);
        if (*construct) return cmd_construct(cfg, pr);
        if (*optc) return cmd_opt(cfg, pr);
        if (*pos) return cmd_pos(cfg, pr);
        if (*audit) return cmd_sybil_audit(cfg, pr);
        if (*best) return cmd_sybil_best(cfg, pr);
        if (*wf) return cmd_waterfill(cfg, pr);
        if (*ver) return cmd_verify(cfg, pr, err);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return input_error;
    } catch (const PremiseError& e) {
        err << "premise unmet: " << e.what() << '\n';
        return premise_unmet;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }
    return input_error;
}

}  // namespace stakepool::cli
