// trielab command-line laboratory.
//
// Subcommands:
//   predict            print every applicable asymptotic prediction
//   simulate <kind>    Monte Carlo run + comparison gate (CSV or JSON)
//   codes build|stats|encode|decode
//   walk               two-boundary stopped-walk experiment
//   selftest           acceptance suite
//
// Exit codes: 0 success / all gates passed, 1 a comparison or acceptance
// criterion failed, 2 usage or input error.
//
// Determinism contract: for a fixed flag set (including --seed) the bytes on
// stdout are identical run to run, independent of --threads.  All numbers are
// printed with "%.12g".

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trielab/acceptance.hpp"
#include "trielab/codes.hpp"
#include "trielab/sim.hpp"
#include "trielab/source.hpp"
#include "trielab/theory.hpp"
#include "trielab/tolerances.hpp"
#include "trielab/vfc_format.hpp"

namespace {

constexpr uint64_t default_seed = 1234567891;  // documented fixed default

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// Collected report text: printed to stdout once, optionally copied to --out.
struct sink {
    std::string text;
    void line(const std::string& s) {
        text += s;
        text += '\n';
    }
    int flush(const std::string& out_path) const {
        std::fputs(text.c_str(), stdout);
        if (!out_path.empty()) {
            std::ofstream f(out_path, std::ios::binary);
            if (!f) {
                std::fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
                return 2;
            }
            f << text;
        }
        return 0;
    }
};

struct source_flags {
    double p = 0.5;
    bool p_given = false;
    std::string arith;

    void attach(CLI::App* cmd) {
        cmd->add_option("--p", p, "source parameter P(1) = p in (0,1)")
            ->check(CLI::Range(1e-12, 1.0 - 1e-12))
            ->each([this](const std::string&) { p_given = true; });
        cmd->add_option("--arith", arith,
                        "classify the source as arithmetic with ln p/ln q = a:b "
                        "(constructs p when --p is absent; cross-checks when both given)");
    }

    [[nodiscard]] trielab::source_params resolve() const {
        if (!arith.empty()) {
            uint32_t a = 0, b = 0;
            char extra = 0;
            if (std::sscanf(arith.c_str(), "%" SCNu32 ":%" SCNu32 "%c", &a, &b, &extra) != 2)
                throw std::invalid_argument("--arith expects the form a:b (coprime integers)");
            const trielab::source_params solved = trielab::source_params::from_lattice(a, b);
            if (p_given && std::fabs(solved.p() - p) > 1e-9)
                throw std::invalid_argument(
                    "--p disagrees with --arith: solved p = " + fmt(solved.p()));
            return solved;
        }
        return trielab::source_params(p);
    }
};

std::string arith_label(const trielab::source_params& src) {
    if (!src.arithmetic()) return "none";
    return std::to_string(src.lattice().a) + ":" + std::to_string(src.lattice().b);
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

struct predict_row {
    std::string quantity;
    std::string size;  // numeric text or "-"
    trielab::theory::prediction pred;
};

int run_predict(const source_flags& sf, const std::vector<uint64_t>& sizes, double lambda,
                double R, uint64_t M, uint64_t K, double V, uint32_t bucket,
                const std::string& output, const std::string& out_path) {
    const trielab::source_params src = sf.resolve();
    namespace th = trielab::theory;
    std::vector<predict_row> rows;
    auto add = [&](const std::string& q, const std::string& size, th::prediction p) {
        rows.push_back({q, size, std::move(p)});
    };

    for (uint64_t n : sizes) {
        const auto dn = static_cast<double>(n);
        add("depth-mean", std::to_string(n), th::depth_mean(src, dn));
        add("depth-variance", std::to_string(n), th::depth_variance(src, dn));
        add("patricia-depth-mean", std::to_string(n), th::patricia_depth_mean(src, dn));
        add("imbalance-mean", std::to_string(n), th::imbalance_mean(src, dn));
        add("trie-size-per-string", std::to_string(n), th::trie_size_per_string(src, dn));
        add("insertion-split-probability", std::to_string(n),
            th::insertion_split_probability(src, dn));
        add("insertion-mean-new-nodes", std::to_string(n),
            th::insertion_mean_new_nodes(src, dn));
        for (uint32_t j = 1; j <= bucket; ++j)
            add("bucket-occupancy-b" + std::to_string(bucket) + "-j" + std::to_string(j),
                std::to_string(n), th::bucket_occupancy_fraction(src, bucket, j, dn));
    }
    add("patricia-depth-saving", "-", th::patricia_depth_saving(src));
    {
        auto slope = [&](double v) {
            th::prediction p;
            p.value = p.smooth = v;
            p.oscillation = 0.0;
            p.regime = "slope";
            return p;
        };
        add("depth-variance-slope", "-", slope(th::depth_variance_slope(src)));
        add("imbalance-variance-slope", "-", slope(th::imbalance_variance_slope(src)));
        add("phrase-length-variance-slope", "-", slope(th::phrase_length_variance_slope(src)));
    }
    add("trie-size-per-string-poisson", fmt(lambda), th::trie_size_per_string(src, lambda));
    add("khodak-size-ratio", fmt(R), th::khodak_size_ratio(src, R));
    add("khodak-length-mean", fmt(R), th::khodak_length_mean(src, R));
    add("khodak-rate", fmt(R), th::khodak_rate(src, R));
    add("tunstall-length-mean", std::to_string(M),
        th::tunstall_length_mean(src, static_cast<double>(M)));
    add("tunstall-rate", std::to_string(M), th::tunstall_rate(src, static_cast<double>(M)));
    {
        const auto w = th::stopped_walk(src, K, V);
        th::prediction pm;
        pm.value = pm.smooth = w.mean;
        pm.oscillation = 0.0;
        pm.regime = w.regime;
        add("walk-mean-K" + std::to_string(K), fmt(V), pm);
        th::prediction pv;
        pv.value = pv.smooth = w.variance;
        pv.oscillation = 0.0;
        pv.regime = w.regime;
        add("walk-variance-K" + std::to_string(K), fmt(V), pv);
    }

    sink out;
    if (output == "json") {
        std::string j = "[";
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i) j += ",";
            j += "{\"quantity\":\"" + rows[i].quantity + "\",\"p\":" + fmt(src.p()) +
                 ",\"arith\":" +
                 (src.arithmetic() ? "\"" + arith_label(src) + "\"" : std::string("null")) +
                 ",\"size\":\"" + rows[i].size + "\",\"value\":" + fmt(rows[i].pred.value) +
                 ",\"smooth\":" + fmt(rows[i].pred.smooth) +
                 ",\"osc\":" + fmt(rows[i].pred.oscillation) + ",\"regime\":\"" +
                 rows[i].pred.regime + "\"}";
        }
        j += "]";
        out.line(j);
    } else {
        out.line("quantity,p,arith,size,value,smooth,osc,regime");
        for (const auto& r : rows) {
            out.line(r.quantity + "," + fmt(src.p()) + "," + arith_label(src) + "," + r.size +
                     "," + fmt(r.pred.value) + "," + fmt(r.pred.smooth) + "," +
                     fmt(r.pred.oscillation) + "," + r.pred.regime);
        }
    }
    return out.flush(out_path);
}

// ---------------------------------------------------------------------------
// simulate / walk
// ---------------------------------------------------------------------------

int run_simulate(trielab::experiment_spec spec, const std::string& output,
                 const std::string& out_path) {
    const trielab::comparison c = trielab::evaluate(spec);
    sink out;
    if (output == "json") {
        out.line(trielab::json_report(spec, c));
    } else {
        out.line(trielab::csv_header());
        out.line(trielab::csv_row(spec, c));
    }
    const int rc = out.flush(out_path);
    if (rc != 0) return rc;
    return c.pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// codes
// ---------------------------------------------------------------------------

trielab::dictionary build_dictionary(const trielab::source_params& src, uint64_t tunstall_M,
                                     double khodak_R) {
    const bool has_t = tunstall_M != 0;
    const bool has_k = khodak_R != 0.0;
    if (has_t == has_k)
        throw std::invalid_argument("give exactly one of --tunstall M / --khodak R");
    if (has_t) return trielab::dictionary::tunstall(src, tunstall_M);
    return trielab::dictionary::khodak(src, khodak_R);
}

std::string phrase_text(const std::vector<uint8_t>& w) {
    std::string s;
    for (uint8_t bit : w) s += bit ? '1' : '0';
    return s;
}

void dump_summary(sink& out, const trielab::dictionary& dict) {
    const auto st = dict.statistics();
    out.line("summary,method,param,M,ell,mean_len,var_len,kappa,kraft,min_len,max_len");
    const char* method = dict.construction() == trielab::dictionary::method::tunstall
                             ? "tunstall"
                             : (dict.construction() == trielab::dictionary::method::khodak
                                    ? "khodak"
                                    : "custom");
    out.line(std::string("summary,") + method + "," + fmt(dict.parameter()) + "," +
             std::to_string(dict.size()) + "," + std::to_string(dict.codeword_bits()) + "," +
             fmt(st.mean_length) + "," + fmt(st.variance) + "," + fmt(st.kappa) + "," +
             fmt(st.kraft_sum) + "," + std::to_string(st.min_length) + "," +
             std::to_string(st.max_length));
}

int run_codes_build(const source_flags& sf, uint64_t tunstall_M, double khodak_R, bool dump,
                    const std::string& out_path) {
    const trielab::source_params src = sf.resolve();
    const trielab::dictionary dict = build_dictionary(src, tunstall_M, khodak_R);
    sink out;
    dump_summary(out, dict);
    if (dump) {
        out.line("phrase,index,bits,length,prob");
        for (uint64_t i = 0; i < dict.size(); ++i) {
            const auto& w = dict.phrases()[i];
            out.line("phrase," + std::to_string(i) + "," + phrase_text(w) + "," +
                     std::to_string(w.size()) + "," + fmt(dict.phrase_probability(i)));
        }
    }
    return out.flush(out_path);
}

int run_codes_stats(const source_flags& sf, uint64_t tunstall_M, double khodak_R,
                    const std::string& out_path) {
    const trielab::source_params src = sf.resolve();
    const trielab::dictionary dict = build_dictionary(src, tunstall_M, khodak_R);
    sink out;
    dump_summary(out, dict);
    const auto st = dict.statistics();
    namespace th = trielab::theory;
    const bool tun = dict.construction() == trielab::dictionary::method::tunstall;
    const auto len_pred = tun ? th::tunstall_length_mean(src, static_cast<double>(dict.size()))
                              : th::khodak_length_mean(src, dict.parameter());
    const auto rate_pred = tun ? th::tunstall_rate(src, static_cast<double>(dict.size()))
                               : th::khodak_rate(src, dict.parameter());
    out.line("prediction,quantity,exact,predicted,diff,regime");
    out.line("prediction,mean_len," + fmt(st.mean_length) + "," + fmt(len_pred.value) + "," +
             fmt(st.mean_length - len_pred.value) + "," + len_pred.regime);
    out.line("prediction,kappa," + fmt(st.kappa) + "," + fmt(rate_pred.value) + "," +
             fmt(st.kappa - rate_pred.value) + "," + rate_pred.regime);
    return out.flush(out_path);
}

std::vector<uint8_t> read_bit_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot read " + path);
    std::vector<uint8_t> bits;
    char c;
    while (f.get(c)) {
        if (c == '0') bits.push_back(0);
        else if (c == '1') bits.push_back(1);
        else if (c == '\n' || c == '\r' || c == ' ' || c == '\t') continue;
        else throw std::invalid_argument("input must contain only 0/1 and whitespace");
    }
    return bits;
}

int run_codes_encode(const source_flags& sf, uint64_t tunstall_M, double khodak_R,
                     const std::string& input, uint64_t random_bits, uint64_t seed,
                     const std::string& out_path) {
    const trielab::source_params src = sf.resolve();
    const trielab::dictionary dict = build_dictionary(src, tunstall_M, khodak_R);
    std::vector<uint8_t> bits;
    if (!input.empty() && random_bits > 0)
        throw std::invalid_argument("give an input file or --random N, not both");
    if (!input.empty()) {
        bits = read_bit_file(input);
    } else {
        trielab::counter_rng rng(seed, 0);
        bits.resize(random_bits);
        for (uint64_t i = 0; i < random_bits; ++i) bits[i] = rng.bernoulli(src.p()) ? 1 : 0;
    }
    const auto codewords = dict.encode_bits(bits);
    const auto blob = trielab::vfc::serialize(dict, codewords, bits.size());
    if (out_path.empty()) throw std::invalid_argument("--out FILE is required for encode");
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write " + out_path);
    f.write(reinterpret_cast<const char*>(blob.data()),
            static_cast<std::streamsize>(blob.size()));
    sink out;
    out.line("encoded,source_bits,codewords,code_bits,container_bytes");
    out.line("encoded," + std::to_string(bits.size()) + "," + std::to_string(codewords.size()) +
             "," + std::to_string(codewords.size() * dict.codeword_bits()) + "," +
             std::to_string(blob.size()));
    return out.flush("");
}

int run_codes_decode(const std::string& input, const std::string& out_path) {
    std::ifstream f(input, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot read " + input);
    std::vector<uint8_t> blob((std::istreambuf_iterator<char>(f)),
                              std::istreambuf_iterator<char>());
    const auto decoded = trielab::vfc::deserialize(blob);
    if (!out_path.empty()) {
        std::ofstream o(out_path, std::ios::binary);
        if (!o) throw std::invalid_argument("cannot write " + out_path);
        std::string text;
        text.reserve(decoded.bits.size());
        for (uint8_t b : decoded.bits) text += b ? '1' : '0';
        o << text;
    }
    sink out;
    out.line("decoded,source_bits,codewords,M,p");
    out.line("decoded," + std::to_string(decoded.bits.size()) + "," +
             std::to_string(decoded.codewords.size()) + "," +
             std::to_string(decoded.phrases.size()) + "," + fmt(decoded.p));
    return out.flush("");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trielab: random tries, variable-to-fixed codes, and their renewal-theoretic "
                 "predictions"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read flags from an INI file");
    app.failure_message(CLI::FailureMessage::simple);

    // ---- predict ----
    auto* predict = app.add_subcommand("predict", "print all applicable predictions");
    source_flags predict_src;
    predict_src.attach(predict);
    std::vector<uint64_t> predict_sizes{256, 4096, 65536, 1048576};
    double predict_lambda = 1e5, predict_R = 1e4, predict_V = 1000.0;
    uint64_t predict_M = 4096, predict_K = 1000;
    uint32_t predict_b = 2;
    std::string predict_output = "csv", predict_out;
    predict->add_option("--n", predict_sizes, "string-count grid");
    predict->add_option("--lambda", predict_lambda, "Poisson intensity");
    predict->add_option("--R", predict_R, "dictionary threshold");
    predict->add_option("--M", predict_M, "dictionary size");
    predict->add_option("--K", predict_K, "walk step cap");
    predict->add_option("--V", predict_V, "walk wall position (bits)");
    predict->add_option("--b", predict_b, "bucket capacity")->check(CLI::Range(1, 64));
    predict->add_option("--output", predict_output, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    predict->add_option("--out", predict_out, "also write the report to PATH");

    // ---- simulate ----
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiment + comparison gate");
    source_flags sim_src;
    sim_src.attach(simulate);
    std::string sim_kind;
    simulate
        ->add_option("kind", sim_kind,
                     "one of: depth, patricia-depth, imbalance, trie-size, btrie-occupancy, "
                     "insert, khodak-len, tunstall-len, parse-count, stopped-walk, "
                     "depth-via-renewal")
        ->required();
    uint64_t sim_n = 1024, sim_M = 4096, sim_K = 1000, sim_reps = 10000,
             sim_seed = default_seed;
    double sim_lambda = 0.0, sim_R = 1e4, sim_V = 1000.0;
    uint32_t sim_b = 2, sim_j = 1, sim_threads = 0;
    bool sim_n_given = false, sim_lambda_given = false;
    std::string sim_output = "csv", sim_out;
    simulate->add_option("--n", sim_n, "string count / letters to cover (default 1024)")
        ->each([&](const std::string&) { sim_n_given = true; });
    simulate
        ->add_option("--lambda", sim_lambda,
                     "Poisson intensity; selects the Poisson-sized model for trie-size / "
                     "btrie-occupancy")
        ->each([&](const std::string&) { sim_lambda_given = true; });
    simulate->add_option("--R", sim_R, "first-passage threshold (default 1e4)");
    simulate->add_option("--M", sim_M, "dictionary size (default 4096)");
    simulate->add_option("--K", sim_K, "walk step cap (default 1000)");
    simulate->add_option("--V", sim_V, "walk wall position in bits (default 1000)");
    simulate->add_option("--b", sim_b, "bucket capacity (default 2)")->check(CLI::Range(1, 64));
    simulate->add_option("--j", sim_j, "occupancy count to report (default 1)");
    simulate->add_option("--reps", sim_reps, "replicates (default 10000)");
    simulate->add_option("--seed", sim_seed, "base seed (default 1234567891)");
    simulate->add_option("--threads", sim_threads, "worker threads, 0 = all cores");
    simulate->add_option("--output", sim_output, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    simulate->add_option("--out", sim_out, "also write the report to PATH");

    // ---- codes ----
    auto* codes = app.add_subcommand("codes", "dictionary construction and the VFC1 codec");
    codes->require_subcommand(1);
    source_flags codes_src;
    uint64_t codes_tunstall = 0, codes_random = 0, codes_seed = default_seed;
    double codes_khodak = 0.0;
    bool codes_dump = false;
    std::string codes_in, codes_out;
    auto* cb = codes->add_subcommand("build", "build a dictionary, print its table");
    auto* cs = codes->add_subcommand("stats", "dictionary statistics vs predictions");
    auto* ce = codes->add_subcommand("encode", "encode 0/1 text (or random bits) to VFC1");
    auto* cd = codes->add_subcommand("decode", "decode a VFC1 container");
    for (CLI::App* sub : {cb, cs, ce}) {
        codes_src.attach(sub);
        sub->add_option("--tunstall,--M", codes_tunstall, "build a size-M dictionary");
        sub->add_option("--khodak,--R", codes_khodak, "build a threshold-R dictionary");
    }
    cb->add_flag("--dump", codes_dump, "print the full phrase table");
    cb->add_option("--out", codes_out, "also write the report to PATH");
    cs->add_option("--out", codes_out, "also write the report to PATH");
    ce->add_option("input", codes_in, "file of ASCII 0/1 source bits");
    ce->add_option("--random", codes_random, "encode N freshly sampled source bits instead");
    ce->add_option("--seed", codes_seed, "seed for --random (default 1234567891)");
    ce->add_option("--out", codes_out, "output VFC1 file (required)");
    cd->add_option("input", codes_in, "VFC1 file")->required();
    cd->add_option("--out", codes_out, "write decoded bits as ASCII 0/1 to PATH");

    // ---- walk ----
    auto* walk = app.add_subcommand("walk", "two-boundary stopped-walk experiment");
    source_flags walk_src;
    walk_src.attach(walk);
    uint64_t walk_K = 1000, walk_reps = 10000, walk_seed = default_seed;
    double walk_V = 1000.0;
    uint32_t walk_threads = 0;
    std::string walk_output = "csv", walk_out;
    walk->add_option("--K", walk_K, "step cap (default 1000)");
    walk->add_option("--V", walk_V, "wall position in bits (default 1000)");
    walk->add_option("--reps", walk_reps, "replicates (default 10000)");
    walk->add_option("--seed", walk_seed, "base seed (default 1234567891)");
    walk->add_option("--threads", walk_threads, "worker threads, 0 = all cores");
    walk->add_option("--output", walk_output, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    walk->add_option("--out", walk_out, "also write the report to PATH");

    // ---- selftest ----
    auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
    uint64_t self_seed = default_seed;
    uint32_t self_threads = 0;
    selftest->add_option("--seed", self_seed, "base seed (default 1234567891)");
    selftest->add_option("--threads", self_threads, "worker threads, 0 = all cores");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (predict->parsed()) {
            return run_predict(predict_src, predict_sizes, predict_lambda, predict_R, predict_M,
                               predict_K, predict_V, predict_b, predict_output, predict_out);
        }
        if (simulate->parsed()) {
            trielab::experiment_spec spec;
            if (!trielab::parse_kind(sim_kind, spec.kind))
                throw std::invalid_argument("unknown experiment kind: " + sim_kind);
            spec.src = sim_src.resolve();
            const bool size_kind = spec.kind == trielab::experiment_kind::trie_size ||
                                   spec.kind == trielab::experiment_kind::btrie_occupancy;
            if (sim_lambda_given && !size_kind)
                throw std::invalid_argument(
                    "--lambda (Poisson-sized model) applies to trie-size / btrie-occupancy only");
            if (sim_lambda_given && sim_n_given)
                throw std::invalid_argument("give --n or --lambda, not both");
            spec.poissonized = sim_lambda_given;
            spec.n = sim_n;
            spec.lambda = sim_lambda;
            spec.R = sim_R;
            spec.M = sim_M;
            spec.K = sim_K;
            spec.V = sim_V;
            spec.bucket = sim_b;
            spec.occupancy_j = sim_j;
            spec.replicates = sim_reps;
            spec.seed = sim_seed;
            spec.threads = sim_threads;
            return run_simulate(spec, sim_output, sim_out);
        }
        if (codes->parsed()) {
            if (cb->parsed())
                return run_codes_build(codes_src, codes_tunstall, codes_khodak, codes_dump,
                                       codes_out);
            if (cs->parsed())
                return run_codes_stats(codes_src, codes_tunstall, codes_khodak, codes_out);
            if (ce->parsed())
                return run_codes_encode(codes_src, codes_tunstall, codes_khodak, codes_in,
                                        codes_random, codes_seed, codes_out);
            if (cd->parsed()) return run_codes_decode(codes_in, codes_out);
        }
        if (walk->parsed()) {
            trielab::experiment_spec spec;
            spec.kind = trielab::experiment_kind::stopped_walk;
            spec.src = walk_src.resolve();
            spec.K = walk_K;
            spec.V = walk_V;
            spec.replicates = walk_reps;
            spec.seed = walk_seed;
            spec.threads = walk_threads;
            return run_simulate(spec, walk_output, walk_out);
        }
        if (selftest->parsed()) {
            trielab::acceptance::options opts;
            opts.seed = self_seed;
            opts.threads = self_threads;
            const auto results = trielab::acceptance::run_all(opts);
            return trielab::acceptance::report(results, stdout);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    std::fprintf(stderr, "error: no subcommand\n");
    return 2;
}
