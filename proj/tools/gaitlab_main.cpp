// Command line harness for the supported-biped gait evolution lab.
//
//   gaitlab evolve     one evolutionary run for one morphology
//   gaitlab experiment full grid from a JSON plan
//   gaitlab replay     re-simulate a saved champion genome
//   gaitlab report     rebuild curve.csv / table3.csv from run artifacts

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "gaitlab/gaitlab.hpp"

namespace {

int cmd_evolve(const std::string& morphology, double prob, std::uint64_t seed, int pop, int gens,
               const std::string& out_dir) {
    using namespace gaitlab;
    const Morphology morph = Morphology::standard(parse_morphology(morphology));
    EvolutionConfig cfg;
    cfg.population_size = pop;
    cfg.generations = gens;
    cfg.mutation_prob = prob;
    cfg.genome_len = morph.genome_length();
    cfg.rng_seed = seed;
    const SimConfig sim;

    const FitnessFn fn = [&](const GaitGenome& g, std::uint64_t s) {
        return evaluate_gait(g, morph, sim, s).fitness;
    };
    const RunResult run = run_evolution(cfg, fn, [](const GenerationStats& s) {
        std::cout << "gen " << s.generation << " best " << s.best_fitness << " mean "
                  << s.fitness_mean << " std " << s.fitness_std << '\n';
    });

    RunRecord rec;
    rec.morphology = morph.kind;
    rec.mutation_prob = prob;
    rec.seed = seed;
    rec.stats = run.stats;
    rec.final_population = run.final_population;
    std::size_t best = 0;
    for (std::size_t i = 1; i < rec.final_population.size(); ++i) {
        if (rec.final_population[i].fitness > rec.final_population[best].fitness) best = i;
    }
    rec.champion = rec.final_population[best].genome;
    rec.champion_fitness = rec.final_population[best].fitness;
    write_run_artifacts(out_dir, rec);
    std::cout << "champion fitness " << rec.champion_fitness << ", artifacts in " << out_dir
              << '\n';
    return 0;
}

int cmd_experiment(const std::string& plan_path, const std::string& out_override) {
    gaitlab::ExperimentPlan plan = gaitlab::load_plan(plan_path);
    if (!out_override.empty()) plan.output_dir = out_override;
    const auto records = gaitlab::run_experiment(plan, &std::cout);
    std::cout << records.size() << " runs completed, artifacts in " << plan.output_dir << '\n';
    return 0;
}

int cmd_replay(const std::string& genome_path, const std::string& morphology,
               const std::string& csv_path) {
    using namespace gaitlab;
    const ChampionFile champion = load_champion(genome_path);
    const MorphologyKind requested = parse_morphology(morphology);
    require_morphology(champion, requested);
    const Morphology morph = Morphology::standard(requested);
    const SimConfig sim;
    Trace trace;
    const ReplaySummary summary = replay_gait(champion.genome, morph, sim, &trace);
    if (!csv_path.empty()) {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + csv_path);
        write_trace_csv(out, trace, morph.kind);
    }
    std::cout << "Distance (m): " << csv_double(summary.distance_m) << '\n'
              << "Time (s): " << csv_double(summary.time_s) << '\n'
              << "Avg. velocity (m/s): " << csv_double(summary.velocity_mps) << '\n';
    return 0;
}

int cmd_report(const std::string& in_dir) {
    gaitlab::regenerate_reports(in_dir);
    std::cout << "reports rebuilt under " << in_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Supported-biped gait evolution lab"};
    app.require_subcommand(1);

    std::string morphology, out_dir = "evolve_out", plan_path, genome_path, csv_path, in_dir;
    double prob = 0.5;
    std::uint64_t seed = 1;
    int pop = 256, gens = 50;

    auto* evolve = app.add_subcommand("evolve", "Run one evolutionary gait optimization");
    evolve->add_option("--morphology", morphology, "nofoot, static or active")->required();
    evolve->add_option("--mutation-prob", prob, "per-gene mutation probability")->required();
    evolve->add_option("--seed", seed, "RNG seed")->required();
    evolve->add_option("--pop", pop, "population size (multiple of 4)");
    evolve->add_option("--gens", gens, "generations");
    evolve->add_option("--out", out_dir, "output directory");

    auto* experiment = app.add_subcommand("experiment", "Run the full experiment grid");
    experiment->add_option("--plan", plan_path, "experiment plan JSON")->required();
    std::string out_override;
    experiment->add_option("--out", out_override, "override the plan's output directory");

    auto* replay = app.add_subcommand("replay", "Re-simulate a saved champion genome");
    replay->add_option("--genome", genome_path, "champion JSON file")->required();
    replay->add_option("--morphology", morphology, "nofoot, static or active")->required();
    replay->add_option("--csv", csv_path, "write the step trace to this CSV file");

    auto* report = app.add_subcommand("report", "Rebuild aggregate reports from run artifacts");
    report->add_option("--in", in_dir, "experiment output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (evolve->parsed()) return cmd_evolve(morphology, prob, seed, pop, gens, out_dir);
        if (experiment->parsed()) return cmd_experiment(plan_path, out_override);
        if (replay->parsed()) return cmd_replay(genome_path, morphology, csv_path);
        if (report->parsed()) return cmd_report(in_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
