#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaitlab/csv.hpp"
#include "gaitlab/evolution.hpp"
#include "gaitlab/gait.hpp"
#include "gaitlab/sim.hpp"

namespace gaitlab {

// Experiment harness: runs the three-morphology comparison (a grid of
// mutation probabilities x seeds per morphology), persists per-run genomes
// and statistics, aggregates learning curves and final-generation tables,
// and replays saved champions.
//
// Output layout, reproducible byte-for-byte from the plan:
//   <out>/<morphology>/<prob>/<seed>/generations.csv
//   <out>/<morphology>/<prob>/<seed>/final_population.csv
//   <out>/<morphology>/<prob>/<seed>/champion.json
//   <out>/<morphology>/curve.csv
//   <out>/<morphology>/table3.csv

struct IncompleteRuns : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedGenomeFile : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MorphologyMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const char* morphology_name(MorphologyKind kind) {
    switch (kind) {
        case MorphologyKind::NoFoot: return "nofoot";
        case MorphologyKind::StaticAnkle: return "static";
        default: return "active";
    }
}

inline MorphologyKind parse_morphology(const std::string& name) {
    if (name == "nofoot") return MorphologyKind::NoFoot;
    if (name == "static") return MorphologyKind::StaticAnkle;
    if (name == "active") return MorphologyKind::ActiveAnkle;
    throw std::invalid_argument("unknown morphology '" + name +
                                "' (expected nofoot, static or active)");
}

struct ExperimentPlan {
    std::vector<MorphologyKind> morphologies = {MorphologyKind::NoFoot, MorphologyKind::StaticAnkle,
                                                MorphologyKind::ActiveAnkle};
    std::vector<double> mutation_probs = {0.3, 0.5, 0.7};
    int seeds_per_prob = 3;  // run seeds are rng_seed + 0 .. rng_seed + seeds_per_prob-1
    EvolutionConfig evolution;  // template; mutation_prob/genome_len/rng_seed set per cell
    SimConfig sim;
    std::string output_dir = "out";

    int runs_per_morphology() const {
        return static_cast<int>(mutation_probs.size()) * seeds_per_prob;
    }
};

struct RunRecord {
    MorphologyKind morphology = MorphologyKind::NoFoot;
    double mutation_prob = 0.0;
    std::uint64_t seed = 0;
    std::vector<GenerationStats> stats;
    std::vector<Individual> final_population;
    GaitGenome champion;
    double champion_fitness = 0.0;
};

// ---------------------------------------------------------------- plan JSON

inline nlohmann::json plan_to_json(const ExperimentPlan& plan) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["morphologies"] = nlohmann::json::array();
    for (MorphologyKind m : plan.morphologies) j["morphologies"].push_back(morphology_name(m));
    j["mutation_probs"] = plan.mutation_probs;
    j["seeds_per_prob"] = plan.seeds_per_prob;
    j["evolution"] = {{"population_size", plan.evolution.population_size},
                      {"generations", plan.evolution.generations},
                      {"rng_seed", plan.evolution.rng_seed},
                      {"threads", plan.evolution.threads}};
    j["sim"] = {{"period_s", plan.sim.period_s},
                {"steps_per_period", plan.sim.steps_per_period},
                {"periods", plan.sim.periods},
                {"w_joints", plan.sim.weights.w_joints},
                {"w_angle", plan.sim.weights.w_angle},
                {"step_cost", plan.sim.weights.step_cost},
                {"fitness_noise_std", plan.sim.fitness_noise_std}};
    j["output_dir"] = plan.output_dir;
    return j;
}

inline ExperimentPlan plan_from_json(const nlohmann::json& j) {
    ExperimentPlan plan;
    if (j.contains("morphologies")) {
        plan.morphologies.clear();
        for (const auto& name : j.at("morphologies")) {
            plan.morphologies.push_back(parse_morphology(name.get<std::string>()));
        }
    }
    plan.mutation_probs = j.value("mutation_probs", plan.mutation_probs);
    plan.seeds_per_prob = j.value("seeds_per_prob", plan.seeds_per_prob);
    if (j.contains("evolution")) {
        const auto& e = j.at("evolution");
        plan.evolution.population_size = e.value("population_size", plan.evolution.population_size);
        plan.evolution.generations = e.value("generations", plan.evolution.generations);
        plan.evolution.rng_seed = e.value("rng_seed", plan.evolution.rng_seed);
        plan.evolution.threads = e.value("threads", plan.evolution.threads);
    }
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        plan.sim.period_s = s.value("period_s", plan.sim.period_s);
        plan.sim.steps_per_period = s.value("steps_per_period", plan.sim.steps_per_period);
        plan.sim.periods = s.value("periods", plan.sim.periods);
        plan.sim.weights.w_joints = s.value("w_joints", plan.sim.weights.w_joints);
        plan.sim.weights.w_angle = s.value("w_angle", plan.sim.weights.w_angle);
        plan.sim.weights.step_cost = s.value("step_cost", plan.sim.weights.step_cost);
        plan.sim.fitness_noise_std = s.value("fitness_noise_std", plan.sim.fitness_noise_std);
    }
    plan.output_dir = j.value("output_dir", plan.output_dir);
    if (plan.morphologies.empty()) throw std::invalid_argument("plan lists no morphologies");
    if (plan.mutation_probs.empty()) throw std::invalid_argument("plan lists no mutation probs");
    for (double p : plan.mutation_probs) {
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("mutation probs must be in (0,1]");
    }
    if (plan.seeds_per_prob < 1) throw std::invalid_argument("seeds_per_prob must be >= 1");
    return plan;
}

inline ExperimentPlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read plan file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        return plan_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed plan file " + path.string() + ": " + e.what());
    }
}

// ------------------------------------------------------------- file writers

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline std::string prob_dir_name(double prob) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", prob);
    return buf;
}

}  // namespace detail

inline std::string generations_csv_text(const std::vector<GenerationStats>& stats) {
    std::ostringstream os;
    os << "generation,fitness_mean,fitness_std,fitness_best";
    const std::size_t genes = stats.empty() ? 0 : stats.front().gene_mean.size();
    for (std::size_t k = 0; k < genes; ++k) {
        os << ',' << kGeneTable[k].name << "_mean," << kGeneTable[k].name << "_std";
    }
    os << '\n';
    for (const GenerationStats& s : stats) {
        os << s.generation << ',' << csv_double(s.fitness_mean) << ',' << csv_double(s.fitness_std)
           << ',' << csv_double(s.best_fitness);
        for (std::size_t k = 0; k < genes; ++k) {
            os << ',' << csv_double(s.gene_mean[k]) << ',' << csv_double(s.gene_std[k]);
        }
        os << '\n';
    }
    return os.str();
}

inline std::string final_population_csv_text(const std::vector<Individual>& pop,
                                             std::size_t genome_len) {
    std::ostringstream os;
    os << "id,fitness";
    for (std::size_t k = 0; k < genome_len; ++k) os << ',' << kGeneTable[k].name;
    os << '\n';
    for (const Individual& ind : pop) {
        os << ind.id << ',' << csv_double(ind.fitness);
        for (double g : ind.genome) os << ',' << csv_double(g);
        os << '\n';
    }
    return os.str();
}

inline std::string champion_json_text(const RunRecord& rec) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["morphology"] = morphology_name(rec.morphology);
    j["mutation_prob"] = rec.mutation_prob;
    j["seed"] = rec.seed;
    j["fitness"] = rec.champion_fitness;
    j["genome"] = rec.champion;
    return j.dump(2) + "\n";
}

// Writes generations.csv, final_population.csv and champion.json for one run.
inline void write_run_artifacts(const std::filesystem::path& dir, const RunRecord& rec) {
    std::filesystem::create_directories(dir);
    write_file(dir / "generations.csv", generations_csv_text(rec.stats));
    write_file(dir / "final_population.csv",
               final_population_csv_text(rec.final_population, genome_length(rec.morphology)));
    write_file(dir / "champion.json", champion_json_text(rec));
}

// ----------------------------------------------------------- aggregations

struct CurveRow {
    int generation = 0;
    double fitness_mean = 0.0;  // mean of per-run generation means
    double fitness_std = 0.0;   // across-run population std of those means
    double fitness_best = 0.0;  // max across runs
};

// Learning curve pooled over every run of one morphology.
inline std::vector<CurveRow> learning_curve(const std::vector<RunRecord>& records) {
    if (records.empty()) throw IncompleteRuns("no runs to aggregate");
    const std::size_t gens = records.front().stats.size();
    for (const RunRecord& r : records) {
        if (r.stats.size() != gens) {
            throw IncompleteRuns("runs disagree on generation count");
        }
    }
    std::vector<CurveRow> rows(gens);
    const double n = static_cast<double>(records.size());
    for (std::size_t g = 0; g < gens; ++g) {
        CurveRow& row = rows[g];
        row.generation = records.front().stats[g].generation;
        double sum = 0.0, sum2 = 0.0;
        row.fitness_best = -std::numeric_limits<double>::infinity();
        for (const RunRecord& r : records) {
            const double m = r.stats[g].fitness_mean;
            sum += m;
            sum2 += m * m;
            row.fitness_best = std::max(row.fitness_best, r.stats[g].best_fitness);
        }
        row.fitness_mean = sum / n;
        row.fitness_std = std::sqrt(std::max(0.0, sum2 / n - row.fitness_mean * row.fitness_mean));
    }
    return rows;
}

inline std::string curve_csv_text(const std::vector<CurveRow>& rows, std::size_t run_count) {
    std::ostringstream os;
    os << "# aggregated over " << run_count
       << " runs (all mutation probs x seeds of this morphology); fitness_mean = mean of "
          "per-run generation means, fitness_std = across-run std of those means, fitness_best "
          "= max across runs\n";
    os << "generation,fitness_mean,fitness_std,fitness_best\n";
    for (const CurveRow& r : rows) {
        os << r.generation << ',' << csv_double(r.fitness_mean) << ',' << csv_double(r.fitness_std)
           << ',' << csv_double(r.fitness_best) << '\n';
    }
    return os.str();
}

struct ReportRow {
    std::string metric;
    bool present = true;  // genes a morphology lacks are reported empty
    double mean = 0.0;
    double std_dev = 0.0;
};

// Mean and population std of fitness and of each normalized gene, pooled
// over all final-generation individuals of all runs of one morphology.
// Always emits the full canonical gene list; absent genes come back empty.
inline std::vector<ReportRow> final_generation_report(const std::vector<RunRecord>& records) {
    if (records.empty()) throw IncompleteRuns("no runs to report");
    const MorphologyKind kind = records.front().morphology;
    std::size_t total = 0;
    for (const RunRecord& r : records) {
        if (r.morphology != kind) throw IncompleteRuns("mixed morphologies in one report");
        if (r.final_population.empty()) throw IncompleteRuns("run is missing its final population");
        total += r.final_population.size();
    }
    const std::size_t len = genome_length(kind);
    const double n = static_cast<double>(total);

    const auto pooled = [&](auto&& value_of) {
        double sum = 0.0, sum2 = 0.0;
        for (const RunRecord& r : records) {
            for (const Individual& ind : r.final_population) {
                const double v = value_of(ind);
                sum += v;
                sum2 += v * v;
            }
        }
        const double mean = sum / n;
        return std::pair{mean, std::sqrt(std::max(0.0, sum2 / n - mean * mean))};
    };

    std::vector<ReportRow> rows;
    const auto [fm, fs] = pooled([](const Individual& i) { return i.fitness; });
    rows.push_back({"fitness", true, fm, fs});
    for (std::size_t k = 0; k < kGeneTable.size(); ++k) {
        if (k < len) {
            const auto [gm, gs] = pooled([k](const Individual& i) { return i.genome[k]; });
            rows.push_back({kGeneTable[k].name, true, gm, gs});
        } else {
            rows.push_back({kGeneTable[k].name, false, 0.0, 0.0});
        }
    }
    return rows;
}

inline std::string table3_csv_text(const std::vector<ReportRow>& rows) {
    std::ostringstream os;
    os << "metric,mean,std\n";
    for (const ReportRow& r : rows) {
        os << r.metric << ',';
        if (r.present) {
            os << csv_double(r.mean) << ',' << csv_double(r.std_dev);
        } else {
            os << ',';
        }
        os << '\n';
    }
    return os.str();
}

inline void write_morphology_aggregates(const std::filesystem::path& morph_dir,
                                        const std::vector<RunRecord>& records) {
    write_file(morph_dir / "curve.csv", curve_csv_text(learning_curve(records), records.size()));
    write_file(morph_dir / "table3.csv", table3_csv_text(final_generation_report(records)));
}

// ------------------------------------------------------------- experiment

// Runs every (morphology, mutation prob, seed) cell of the plan and writes
// all artifacts under plan.output_dir. Cells write only inside their own
// directory; aggregation runs after a morphology's cells complete.
inline std::vector<RunRecord> run_experiment(const ExperimentPlan& plan,
                                             std::ostream* log = nullptr) {
    namespace fs = std::filesystem;
    const fs::path root = plan.output_dir;
    fs::create_directories(root);

    std::vector<RunRecord> all;
    for (MorphologyKind kind : plan.morphologies) {
        const Morphology morph = Morphology::standard(kind);
        std::vector<RunRecord> morph_records;
        for (double prob : plan.mutation_probs) {
            for (int s = 0; s < plan.seeds_per_prob; ++s) {
                EvolutionConfig cfg = plan.evolution;
                cfg.mutation_prob = prob;
                cfg.genome_len = morph.genome_length();
                cfg.rng_seed = plan.evolution.rng_seed + static_cast<std::uint64_t>(s);

                const FitnessFn fn = [&](const GaitGenome& g, std::uint64_t seed) {
                    return evaluate_gait(g, morph, plan.sim, seed).fitness;
                };
                const RunResult run = run_evolution(cfg, fn);

                RunRecord rec;
                rec.morphology = kind;
                rec.mutation_prob = prob;
                rec.seed = cfg.rng_seed;
                rec.stats = run.stats;
                rec.final_population = run.final_population;
                const std::size_t best = detail::best_index(rec.final_population);
                rec.champion = rec.final_population[best].genome;
                rec.champion_fitness = rec.final_population[best].fitness;

                const fs::path dir = root / morphology_name(kind) /
                                     detail::prob_dir_name(prob) / std::to_string(rec.seed);
                write_run_artifacts(dir, rec);
                if (log) {
                    *log << morphology_name(kind) << " prob=" << detail::prob_dir_name(prob)
                         << " seed=" << rec.seed << " best=" << rec.champion_fitness << '\n';
                }
                morph_records.push_back(std::move(rec));
            }
        }
        write_morphology_aggregates(root / morphology_name(kind), morph_records);
        for (RunRecord& r : morph_records) all.push_back(std::move(r));
    }
    return all;
}

// ------------------------------------------------------------ file readers

inline std::vector<GenerationStats> read_generations_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IncompleteRuns("missing " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IncompleteRuns("empty " + path.string());
    const std::size_t cols = csv_split(line).size();
    if (cols < 4 || (cols - 4) % 2 != 0) throw IncompleteRuns("bad header in " + path.string());
    const std::size_t genes = (cols - 4) / 2;
    std::vector<GenerationStats> stats;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = csv_split(line);
        if (f.size() != cols) throw IncompleteRuns("bad row in " + path.string());
        GenerationStats s;
        s.generation = static_cast<int>(csv_parse_double(f[0]));
        s.fitness_mean = csv_parse_double(f[1]);
        s.fitness_std = csv_parse_double(f[2]);
        s.best_fitness = csv_parse_double(f[3]);
        for (std::size_t k = 0; k < genes; ++k) {
            s.gene_mean.push_back(csv_parse_double(f[4 + 2 * k]));
            s.gene_std.push_back(csv_parse_double(f[5 + 2 * k]));
        }
        stats.push_back(std::move(s));
    }
    return stats;
}

inline std::vector<Individual> read_final_population_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IncompleteRuns("missing " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IncompleteRuns("empty " + path.string());
    const std::size_t cols = csv_split(line).size();
    if (cols < 3) throw IncompleteRuns("bad header in " + path.string());
    std::vector<Individual> pop;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = csv_split(line);
        if (f.size() != cols) throw IncompleteRuns("bad row in " + path.string());
        Individual ind;
        ind.id = static_cast<std::int64_t>(csv_parse_double(f[0]));
        ind.fitness = csv_parse_double(f[1]);
        for (std::size_t k = 2; k < cols; ++k) ind.genome.push_back(csv_parse_double(f[k]));
        pop.push_back(std::move(ind));
    }
    return pop;
}

// Rebuilds curve.csv and table3.csv for every morphology found under root,
// from the per-run files alone. Cells are visited in numeric prob/seed order
// so the output matches what run_experiment wrote.
inline void regenerate_reports(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw IncompleteRuns("no such directory " + root.string());
    bool any = false;
    for (MorphologyKind kind :
         {MorphologyKind::NoFoot, MorphologyKind::StaticAnkle, MorphologyKind::ActiveAnkle}) {
        const fs::path morph_dir = root / morphology_name(kind);
        if (!fs::is_directory(morph_dir)) continue;

        std::vector<std::pair<double, fs::path>> prob_dirs;
        for (const auto& entry : fs::directory_iterator(morph_dir)) {
            if (!entry.is_directory()) continue;
            try {
                prob_dirs.emplace_back(std::stod(entry.path().filename().string()), entry.path());
            } catch (...) {
                continue;  // not a prob cell
            }
        }
        std::sort(prob_dirs.begin(), prob_dirs.end());

        std::vector<RunRecord> records;
        for (const auto& [prob, prob_dir] : prob_dirs) {
            std::vector<std::pair<std::uint64_t, fs::path>> seed_dirs;
            for (const auto& entry : fs::directory_iterator(prob_dir)) {
                if (!entry.is_directory()) continue;
                try {
                    seed_dirs.emplace_back(std::stoull(entry.path().filename().string()),
                                           entry.path());
                } catch (...) {
                    continue;
                }
            }
            std::sort(seed_dirs.begin(), seed_dirs.end());
            for (const auto& [seed, seed_dir] : seed_dirs) {
                RunRecord rec;
                rec.morphology = kind;
                rec.mutation_prob = prob;
                rec.seed = seed;
                rec.stats = read_generations_csv(seed_dir / "generations.csv");
                rec.final_population = read_final_population_csv(seed_dir / "final_population.csv");
                records.push_back(std::move(rec));
            }
        }
        if (records.empty()) throw IncompleteRuns("no completed runs under " + morph_dir.string());
        write_morphology_aggregates(morph_dir, records);
        any = true;
    }
    if (!any) throw IncompleteRuns("no morphology directories under " + root.string());
}

// ---------------------------------------------------------------- replay

struct ChampionFile {
    MorphologyKind morphology = MorphologyKind::NoFoot;
    GaitGenome genome;
    double fitness = 0.0;
    double mutation_prob = 0.0;
    std::uint64_t seed = 0;
};

inline ChampionFile load_champion(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MalformedGenomeFile("cannot read genome file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        ChampionFile c;
        c.morphology = parse_morphology(j.at("morphology").get<std::string>());
        c.genome = j.at("genome").get<GaitGenome>();
        c.fitness = j.value("fitness", 0.0);
        c.mutation_prob = j.value("mutation_prob", 0.0);
        c.seed = j.value("seed", std::uint64_t{0});
        if (static_cast<int>(c.genome.size()) != genome_length(c.morphology)) {
            throw MalformedGenomeFile("genome file " + path.string() + " has " +
                                      std::to_string(c.genome.size()) + " genes but morphology '" +
                                      morphology_name(c.morphology) + "' needs " +
                                      std::to_string(genome_length(c.morphology)));
        }
        for (double g : c.genome) {
            if (!(g >= 0.0 && g <= 1.0)) {
                throw MalformedGenomeFile("genome file " + path.string() +
                                          " has genes outside [0,1]");
            }
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedGenomeFile("malformed genome file " + path.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw MalformedGenomeFile("malformed genome file " + path.string() + ": " + e.what());
    }
}

inline void require_morphology(const ChampionFile& champion, MorphologyKind requested) {
    if (champion.morphology != requested) {
        throw MorphologyMismatch(std::string("genome file is for '") +
                                 morphology_name(champion.morphology) + "', requested '" +
                                 morphology_name(requested) + "'");
    }
}

struct ReplaySummary {
    double distance_m = 0.0;
    double time_s = 0.0;
    double velocity_mps = 0.0;  // distance / (periods * period)
};

// Re-simulates a gait and reports covered distance, duration and mean
// velocity. The trace (when kept) ends exactly at the reported distance.
inline ReplaySummary replay_gait(const GaitGenome& genome, const Morphology& morph,
                                 const SimConfig& cfg, Trace* trace = nullptr) {
    Trace local;
    Trace* sink = trace ? trace : &local;
    evaluate_gait(genome, morph, cfg, 0, sink);
    ReplaySummary s;
    s.distance_m = sink->empty() ? 0.0 : sink->back().body_x_m;
    s.time_s = cfg.periods * cfg.period_s;
    s.velocity_mps = s.time_s > 0.0 ? s.distance_m / s.time_s : 0.0;
    return s;
}

}  // namespace gaitlab
