// rra: command-line driver for weights, transform, search, eval, sweep and
// compare. Every option can also come from --config (INI/TOML); flags win.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rra.hpp"

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rra::InputError("cannot open '" + path + "'");
    return in;
}

// Writes to `path`, or to stdout for "-" / empty.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw rra::InputError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void finish() {
        stream().flush();
        if (!stream()) throw std::runtime_error("write failed");
    }

private:
    std::ofstream file_;
};

struct AnalysisFlags {
    bool stopwords = false;
    bool stem = false;
    rra::Analyzer analyzer() const { return {stopwords, stem}; }
};

struct TransformFlags {
    double alpha = 1.0;
    std::string pretransform = "one-plus";
    double lambda = 1.0;
    std::string prior = "uniform";
    unsigned threads = 1;

    rra::PreTransform f() const { return rra::PreTransform::parse(pretransform, lambda); }

    rra::Prior load_prior(const rra::DocRegistry& docs) const {
        if (prior == "uniform") return rra::Prior::uniform();
        auto in = open_in(prior);
        return rra::io::read_prior(in, docs);
    }
};

void add_analysis(CLI::App& cmd, AnalysisFlags& a) {
    cmd.add_flag("--stopwords", a.stopwords, "Drop English stopwords");
    cmd.add_flag("--stem", a.stem, "Apply the Porter stemmer");
}

void add_transform(CLI::App& cmd, TransformFlags& t) {
    cmd.add_option("--pretransform", t.pretransform, "Initial map f")
        ->check(CLI::IsMember({"identity", "log1p", "exp", "one-plus", "scale", "tanh"}))
        ->capture_default_str();
    cmd.add_option("--lambda", t.lambda, "Factor for --pretransform scale")->capture_default_str();
    cmd.add_option("--prior", t.prior, "'uniform' or a file of 'docid weight' lines")->capture_default_str();
}

rra::SparseLexicon load_weights(const std::string& path) {
    auto in = open_in(path);
    return rra::io::read_weights(in);
}

bool is_snapshot(const std::string& path) {
    auto in = open_in(path);
    std::string first;
    std::getline(in, first);
    return first.find("\"rra-pragmatic\"") != std::string::npos;
}

std::vector<rra::NamedQuery> load_queries(const std::string& path, const rra::Vocabulary& vocab,
                                          const AnalysisFlags& a) {
    auto in = open_in(path);
    return rra::io::vectorize_queries(rra::io::read_queries(in), vocab, a.analyzer());
}

rra::Qrels load_qrels(const std::string& path) {
    auto in = open_in(path);
    return rra::io::read_qrels(in);
}

rra::Run load_run(const std::string& path) {
    auto in = open_in(path);
    return rra::io::read_run(in);
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        grid.push_back(rra::io::parse_double(item.substr(item.find_first_not_of(" \t")), "--sweep"));
    }
    if (grid.empty()) throw std::invalid_argument("--sweep needs at least one alpha");
    return grid;
}

void warn(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "rra: warning: " << w << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rra: pragmatic re-weighting of sparse retrieval lexicons"};
    app.set_config("--config", "", "Read options from an INI/TOML file (command-line flags take precedence)");
    app.require_subcommand(1);

    // weights
    std::string corpus_path, out_path;
    rra::Bm25Params bm25;
    AnalysisFlags analysis;
    auto* weights = app.add_subcommand("weights", "BM25 weight file from a JSON-lines corpus");
    weights->add_option("--corpus", corpus_path, "Corpus: {\"id\", \"text\"} per line")->required();
    weights->add_option("-o,--out", out_path, "Output weight file (default stdout)");
    weights->add_option("--k1", bm25.k1, "BM25 k1")->capture_default_str();
    weights->add_option("--b", bm25.b, "BM25 b")->capture_default_str();
    add_analysis(*weights, analysis);

    // transform
    std::string weights_path;
    TransformFlags tf;
    auto* transform = app.add_subcommand("transform", "Pragmatic snapshot from a weight file");
    transform->add_option("--weights", weights_path, "Weight file")->required();
    transform->add_option("-o,--out", out_path, "Output snapshot (default stdout)");
    transform->add_option("--alpha", tf.alpha, "Speaker rationality")->capture_default_str();
    add_transform(*transform, tf);
    transform->add_option("--threads", tf.threads, "Worker threads (0 = all cores)")->capture_default_str();

    // search
    std::string index_path, queries_path, tag = "rra";
    std::size_t k = 10;
    bool baseline = false;
    std::optional<double> search_alpha;
    auto* search = app.add_subcommand("search", "TREC run from a snapshot or a weight file");
    search->add_option("--index", index_path, "Snapshot, or weight file (transformed on the fly)")->required();
    search->add_option("--queries", queries_path, "Queries: TSV or JSON lines")->required();
    search->add_option("-o,--out", out_path, "Output run (default stdout)");
    search->add_option("--k", k, "Results per query")->capture_default_str()->check(CLI::PositiveNumber);
    search->add_option("--tag", tag, "Run tag")->capture_default_str();
    search->add_flag("--baseline", baseline, "Score with the untransformed weights");
    search->add_option("--alpha", search_alpha, "Speaker rationality for a weight file (default 1)");
    add_transform(*search, tf);
    search->add_option("--threads", tf.threads, "Worker threads (0 = all cores)")->capture_default_str();
    add_analysis(*search, analysis);

    // eval
    std::string run_path, qrels_path;
    bool exclude_zero = false, per_query = false;
    auto* eval = app.add_subcommand("eval", "nDCG@k of a run");
    eval->add_option("--run", run_path, "TREC run")->required();
    eval->add_option("--qrels", qrels_path, "TREC qrels")->required();
    eval->add_option("--k", k, "Cutoff")->capture_default_str()->check(CLI::PositiveNumber);
    eval->add_flag("--exclude-zero-idcg", exclude_zero, "Leave queries without relevant documents out of the mean");
    eval->add_flag("--per-query", per_query, "Print one line per query");

    // sweep
    std::string grid_text;
    auto* sweep = app.add_subcommand("sweep", "nDCG@k for each alpha of a grid, as CSV");
    sweep->add_option("--weights", weights_path, "Weight file")->required();
    sweep->add_option("--queries", queries_path, "Queries")->required();
    sweep->add_option("--qrels", qrels_path, "TREC qrels")->required();
    sweep->add_option("--sweep", grid_text, "Comma-separated alphas (default 0.1,0.25,0.5,0.75,1,1.5,2,3)");
    sweep->add_option("-o,--out", out_path, "CSV output (default stdout)");
    sweep->add_option("--k", k, "Cutoff")->capture_default_str()->check(CLI::PositiveNumber);
    sweep->add_flag("--exclude-zero-idcg", exclude_zero, "Leave queries without relevant documents out of the mean");
    add_transform(*sweep, tf);
    sweep->add_option("--threads", tf.threads, "Worker threads (0 = all cores)")->capture_default_str();
    add_analysis(*sweep, analysis);

    // compare
    std::string run_a, run_b;
    auto* compare = app.add_subcommand("compare", "Per-query nDCG@k of two runs and a paired t-test");
    compare->add_option("--run-a", run_a, "First run")->required();
    compare->add_option("--run-b", run_b, "Second run")->required();
    compare->add_option("--qrels", qrels_path, "TREC qrels")->required();
    compare->add_option("--k", k, "Cutoff")->capture_default_str()->check(CLI::PositiveNumber);
    compare->add_flag("--exclude-zero-idcg", exclude_zero, "Leave queries without relevant documents out");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "rra: error: " << e.what() << '\n';
        return e.get_exit_code() ? e.get_exit_code() : 2;
    }

    try {
        if (*weights) {
            bm25.validate();
            auto in = open_in(corpus_path);
            const auto lex = rra::build_bm25_lexicon(rra::io::read_corpus(in, analysis.analyzer()), bm25);
            Output out(out_path);
            rra::io::write_weights(out.stream(), lex);
            out.finish();
        } else if (*transform) {
            const auto lex = load_weights(weights_path);
            const auto f = tf.f();
            const auto prag = rra::transform(lex, f, tf.alpha, tf.load_prior(lex.doc_registry()), {tf.threads});
            Output out(out_path);
            rra::io::write_snapshot(out.stream(), prag, f);
            out.finish();
        } else if (*search) {
            rra::Run run;
            if (is_snapshot(index_path)) {
                if (baseline) throw std::invalid_argument("--baseline needs a weight file, not a snapshot");
                if (search_alpha) throw std::invalid_argument("--alpha is fixed inside a snapshot");
                auto in = open_in(index_path);
                const auto snap = rra::io::read_snapshot(in);
                const auto index = rra::build_index(snap.lexicon);
                run = rra::run_queries(index, load_queries(queries_path, index.vocabulary(), analysis), k, tf.threads);
            } else {
                const auto lex = load_weights(index_path);
                const auto queries = load_queries(queries_path, lex.vocabulary(), analysis);
                if (baseline) {
                    if (search_alpha) throw std::invalid_argument("--alpha has no effect with --baseline");
                    run = rra::run_baseline(lex, queries, k, tf.threads);
                } else {
                    const auto prag = rra::transform(lex, tf.f(), search_alpha.value_or(1.0),
                                                     tf.load_prior(lex.doc_registry()), {tf.threads});
                    run = rra::run_queries(rra::build_index(prag), queries, k, tf.threads);
                }
            }
            Output out(out_path);
            rra::io::write_run(out.stream(), run, tag);
            out.finish();
        } else if (*eval) {
            const auto report = rra::ndcg_at_k(load_run(run_path), load_qrels(qrels_path), k, exclude_zero);
            warn(report.warnings);
            if (per_query) {
                for (const auto& [qid, v] : report.per_query) {
                    std::cout << qid << '\t' << rra::io::format_score(v) << '\n';
                }
            }
            std::cout << "ndcg@" << k << '\t' << rra::io::format_score(report.mean) << '\n';
        } else if (*sweep) {
            const auto lex = load_weights(weights_path);
            const auto queries = load_queries(queries_path, lex.vocabulary(), analysis);
            const auto grid = grid_text.empty() ? rra::default_alpha_grid() : parse_grid(grid_text);
            const auto result = rra::sweep_alpha(lex, tf.f(), tf.load_prior(lex.doc_registry()), queries,
                                                 load_qrels(qrels_path), grid, {k, exclude_zero, tf.threads});
            Output out(out_path);
            out.stream() << "alpha,mean_ndcg@" << k << '\n';
            for (const auto& p : result.points) {
                out.stream() << rra::io::format_double(p.alpha) << ',' << rra::io::format_score(p.mean_ndcg) << '\n';
            }
            out.finish();
            std::cerr << "best alpha " << rra::io::format_double(result.best_alpha) << " (mean nDCG@" << k << ' '
                      << rra::io::format_score(result.best_mean_ndcg) << ")\n";
        } else if (*compare) {
            const auto qrels = load_qrels(qrels_path);
            const auto a = rra::ndcg_at_k(load_run(run_a), qrels, k, exclude_zero);
            const auto b = rra::ndcg_at_k(load_run(run_b), qrels, k, exclude_zero);
            warn(a.warnings);
            warn(b.warnings);
            std::set<std::string> qids;
            for (const auto& [q, v] : a.per_query) qids.insert(q);
            for (const auto& [q, v] : b.per_query) qids.insert(q);
            std::vector<double> xs, ys;
            std::cout << "qid\tA\tB\tB-A\n";
            for (const auto& q : qids) {
                // A query missing from one run scores 0 there.
                const double x = a.per_query.count(q) ? a.per_query.at(q) : 0.0;
                const double y = b.per_query.count(q) ? b.per_query.at(q) : 0.0;
                xs.push_back(x);
                ys.push_back(y);
                std::cout << q << '\t' << rra::io::format_score(x) << '\t' << rra::io::format_score(y) << '\t'
                          << rra::io::format_score(y - x) << '\n';
            }
            std::cout << "mean\t" << rra::io::format_score(a.mean) << '\t' << rra::io::format_score(b.mean) << '\t'
                      << rra::io::format_score(b.mean - a.mean) << '\n';
            if (xs.size() < 2) {
                std::cerr << "rra: warning: fewer than two queries; no t-test\n";
            } else {
                const auto tt = rra::paired_ttest(ys, xs);
                std::cout << "paired t-test (B vs A): t=" << rra::io::format_score(tt.t)
                          << " p=" << rra::io::format_score(tt.p) << " n=" << tt.n;
                if (tt.degenerate == rra::TTestCase::zero_differences) std::cout << " [all differences zero]";
                if (tt.degenerate == rra::TTestCase::zero_variance) std::cout << " [constant nonzero difference]";
                std::cout << '\n';
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "rra: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
