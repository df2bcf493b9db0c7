// Command-line front end: evaluation, bounded satisfiability search, grammar
// encoding, witness construction and the vocabulary reductions, wired for
// batch use. Exit codes: 0 success, 1 bounded-unsat outcome of `sat`,
// 2 usage/parse errors and exceeded guards.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "da/cfg.hpp"
#include "da/expr.hpp"
#include "da/graph.hpp"
#include "da/modelfind.hpp"
#include "da/reduce.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw da::Error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw da::Error("cannot write file: " + path);
    out << content;
}

std::string pair_set_text(const da::Relation& r, const da::Structure& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& [src, dst] : r.pairs()) {
        if (!first) out += ", ";
        first = false;
        out += "(" + s.token(src) + "," + s.token(dst) + ")";
    }
    return out + "}";
}

std::string witness_text(const da::Witness& w, const da::Structure& s) {
    return "(" + s.token(w.src) + ", " + s.token(w.dst) + ")";
}

// A word is either whitespace/comma separated symbols or, when it has no
// separators, one single-character terminal per character.
da::Word parse_word(const std::string& text, const da::Grammar& g) {
    da::Word word;
    if (text.find(' ') != std::string::npos || text.find(',') != std::string::npos) {
        std::string normalized = text;
        for (auto& ch : normalized)
            if (ch == ',') ch = ' ';
        std::istringstream in(normalized);
        for (std::string piece; in >> piece;) word.push_back(std::move(piece));
    } else {
        for (char ch : text) word.push_back(std::string(1, ch));
    }
    for (const auto& symbol : word)
        if (!g.is_terminal(symbol))
            throw da::Error("word symbol '" + symbol + "' is not a terminal of the grammar");
    return word;
}

std::string name_map_comments(const std::vector<std::pair<std::string, std::string>>& map) {
    std::string out;
    for (const auto& [from, to] : map) out += "# map: " + from + " -> " + to + "\n";
    return out;
}

// Rebuilds the structure so its vocabulary order matches the given one;
// names absent from the structure become empty relations.
da::Structure align_vocabulary(const da::Structure& s, const da::Vocabulary& vocabulary) {
    for (const auto& name : s.vocabulary().names())
        if (!vocabulary.contains(name) && !s.relation(name).empty())
            throw da::Error("structure relation '" + name + "' is not among --names");
    da::Structure out(vocabulary);
    for (const auto& name : vocabulary.names()) {
        if (!s.has_relation(name)) continue;
        for (const auto& [src, dst] : s.relation(name).pairs())
            out.add_edge(name, s.token(src), s.token(dst));
    }
    return out;
}

int run_eval(const std::string& expr_path, const std::string& structure_path,
             const std::string& strategy) {
    da::ExprPtr e = da::parse_expression(read_file(expr_path));
    da::Structure s = da::parse_structure(read_file(structure_path));
    da::EvalStrategy strat =
        strategy == "matrix" ? da::EvalStrategy::Matrix : da::EvalStrategy::Pairs;
    da::Relation result = da::evaluate(*e, s, strat);

    std::cout << "expression: " << da::render_expression(e) << '\n';
    std::cout << "structure: " << structure_path << '\n';
    std::cout << "strategy: " << strategy << '\n';
    std::cout << "result: " << pair_set_text(result, s) << '\n';
    if (result.empty())
        std::cout << "witness: none\n";
    else
        std::cout << "witness: " << witness_text({result.pairs().front().first,
                                                  result.pairs().front().second}, s)
                  << '\n';
    return 0;
}

int run_sat(const std::string& expr_path, unsigned max_size, const std::string& backend_name,
            std::uint64_t budget_ms, const std::string& dimacs_out) {
    da::ExprPtr e = da::parse_expression(read_file(expr_path));
    da::Backend backend =
        backend_name == "cnf" ? da::Backend::Cnf : da::Backend::Enumeration;
    da::Bounds bounds{max_size, budget_ms};
    da::SatReport report = da::check_finite_sat(*e, bounds, backend);

    std::cout << "expression: " << da::render_expression(e) << '\n';
    std::cout << "backend: " << backend_name << '\n';
    std::cout << "max-size: " << max_size << '\n';
    if (!dimacs_out.empty()) {
        write_file(dimacs_out, da::export_dimacs(da::encode_cnf(*e, max_size)));
        std::cout << "dimacs-out: " << dimacs_out << '\n';
    }
    std::cout << "explored: " << report.explored << '\n';

    switch (report.verdict) {
        case da::SatReport::Verdict::Sat: {
            std::cout << "verdict: SAT\n";
            std::cout << "size: " << report.size << '\n';
            std::cout << "witness: " << witness_text(*report.witness, *report.model) << '\n';
            std::cout << "model:\n" << report.model->to_text();
            return 0;
        }
        case da::SatReport::Verdict::UnsatUpTo:
            std::cout << "verdict: UNSAT_UP_TO " << report.size << '\n';
            return 1;
        case da::SatReport::Verdict::Timeout:
            std::cout << "verdict: TIMEOUT " << report.size << '\n';
            std::cout << "note: " << report.note << '\n';
            return 2;
    }
    return 2;
}

int run_degree(const std::string& expr_path) {
    da::ExprPtr e = da::parse_expression(read_file(expr_path));
    std::cout << "expression: " << da::render_expression(e) << '\n';
    std::cout << "degree: " << da::difference_degree(*e) << '\n';
    std::cout << "names:";
    for (const auto& n : da::relation_names(*e)) std::cout << ' ' << n;
    std::cout << '\n';
    std::cout << "uses-intersection: " << (da::uses_intersection(*e) ? "yes" : "no") << '\n';
    return 0;
}

int run_cfg2da(const std::string& grammar_path, const std::string& out_path) {
    da::Grammar g = da::parse_grammar(read_file(grammar_path));
    da::GrammarEncoding enc = da::grammar_encoding(g);

    std::string file = name_map_comments(enc.name_map);
    file += "# vocabulary:";
    for (const auto& n : enc.vocabulary.names()) file += " " + n;
    file += "\n" + da::render_expression(enc.expression) + "\n";
    write_file(out_path, file);

    std::cout << "grammar: " << grammar_path << '\n';
    std::cout << "vocabulary:";
    for (const auto& n : enc.vocabulary.names()) std::cout << ' ' << n;
    std::cout << '\n';
    std::cout << "degree: " << da::difference_degree(*enc.expression) << '\n';
    std::cout << "out: " << out_path << '\n';
    return 0;
}

int run_witness(const std::string& grammar_path, const std::string& word_text,
                const std::string& out_path) {
    da::Grammar g = da::parse_grammar(read_file(grammar_path));
    da::Word word = parse_word(word_text, g);
    da::Structure s = da::witness_structure(g, word);
    da::GrammarEncoding enc = da::grammar_encoding(g);

    write_file(out_path, name_map_comments(enc.name_map) + s.to_text());

    std::cout << "grammar: " << grammar_path << '\n';
    std::cout << "word: " << word_text << '\n';
    std::cout << "domain-size: " << s.active_domain().size() << '\n';
    std::cout << "witness: (0, inf)\n";
    std::cout << "out: " << out_path << '\n';
    return 0;
}

int run_nonmember(const std::string& grammar_path, unsigned max_len) {
    da::Grammar g = da::parse_grammar(read_file(grammar_path));
    auto word = da::find_nonmember_word(g, max_len);
    std::cout << "grammar: " << grammar_path << '\n';
    std::cout << "max-length: " << max_len << '\n';
    if (!word) {
        std::cout << "word: none\n";
        return 0;
    }
    std::cout << "word:";
    for (const auto& s : *word) std::cout << ' ' << s;
    std::cout << '\n';
    return 0;
}

int run_reduce(const std::string& expr_path, const std::string& names_csv, const std::string& to,
               const std::string& out_path, const std::string& model_in,
               const std::string& model_out) {
    da::ExprPtr e = da::parse_expression(read_file(expr_path));
    std::vector<std::string> names;
    std::string normalized = names_csv;
    for (auto& ch : normalized)
        if (ch == ',') ch = ' ';
    std::istringstream in(normalized);
    for (std::string n; in >> n;) names.push_back(n);
    da::Vocabulary vocabulary(names);
    for (const auto& name : da::relation_names(*e))
        if (!vocabulary.contains(name))
            throw da::Error("expression name '" + name + "' is not among --names");

    // `--to one` on a two-name vocabulary is the direct single-step rewrite;
    // anything else goes through the two-name stage first.
    da::ReductionOutput out;
    bool direct_one = to == "one" && vocabulary.size() == 2;
    if (to == "two")
        out = da::reduce_to_two(*e, vocabulary);
    else if (direct_one)
        out = da::reduce_to_one(*e, vocabulary);
    else
        out = da::reduce_full(*e, vocabulary);

    write_file(out_path,
               name_map_comments(out.name_map) + da::render_expression(out.expression) + "\n");

    std::cout << "expression: " << da::render_expression(e) << '\n';
    std::cout << "names: " << names_csv << '\n';
    std::cout << "to: " << to << '\n';
    std::cout << "vocabulary:";
    for (const auto& n : out.vocabulary.names()) std::cout << ' ' << n;
    std::cout << '\n';
    std::cout << "degree: " << da::difference_degree(*out.expression) << '\n';
    std::cout << "out: " << out_path << '\n';

    if (!model_in.empty()) {
        if (model_out.empty()) throw da::Error("--model-in needs --model-out");
        da::Structure k = align_vocabulary(da::parse_structure(read_file(model_in)), vocabulary);
        da::Structure j = to == "two"     ? da::model_to_two(k)
                          : direct_one    ? da::model_to_one(k)
                                          : da::model_to_one(da::model_to_two(k));
        write_file(model_out, j.to_text());
        std::cout << "model-out: " << model_out << '\n';
    }
    return 0;
}

int run_dimacs(const std::string& expr_path, unsigned size, const std::string& out_path) {
    da::ExprPtr e = da::parse_expression(read_file(expr_path));
    da::CnfFormula f = da::encode_cnf(*e, size);
    write_file(out_path, da::export_dimacs(f));
    std::cout << "expression: " << da::render_expression(e) << '\n';
    std::cout << "size: " << size << '\n';
    std::cout << "variables: " << f.variable_count() << '\n';
    std::cout << "clauses: " << f.clauses().size() << '\n';
    std::cout << "out: " << out_path << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"downward-algebra workbench: evaluation, bounded finite satisfiability, "
                 "grammar encodings and vocabulary reductions"};
    app.require_subcommand(1);

    std::string expr_path, structure_path, grammar_path, out_path, model_in, model_out;
    std::string strategy = "pairs", backend = "enum", to, word_text, names_csv, dimacs_out;
    unsigned max_size = 3, max_len = 4, size = 2;
    std::uint64_t budget_ms = 0;

    auto* eval = app.add_subcommand("eval", "evaluate an expression on a structure");
    eval->add_option("--expr", expr_path)->required();
    eval->add_option("--structure", structure_path)->required();
    eval->add_option("--strategy", strategy)->check(CLI::IsMember({"pairs", "matrix"}));

    auto* sat = app.add_subcommand("sat", "search for a finite model up to a size bound");
    sat->add_option("--expr", expr_path)->required();
    sat->add_option("--max-size", max_size)->required();
    sat->add_option("--backend", backend)->check(CLI::IsMember({"enum", "cnf"}));
    sat->add_option("--budget-ms", budget_ms);
    sat->add_option("--dimacs-out", dimacs_out);

    auto* degree = app.add_subcommand("degree", "report difference degree and names");
    degree->add_option("--expr", expr_path)->required();

    auto* cfg2da = app.add_subcommand("cfg2da", "encode a grammar as an expression");
    cfg2da->add_option("--grammar", grammar_path)->required();
    cfg2da->add_option("--out", out_path)->required();

    auto* witness = app.add_subcommand("witness", "build the witness structure for a word "
                                                  "outside the grammar's language");
    witness->add_option("--grammar", grammar_path)->required();
    witness->add_option("--word", word_text)->required();
    witness->add_option("--out", out_path)->required();

    auto* nonmember = app.add_subcommand("nonmember", "least word not generated by the grammar");
    nonmember->add_option("--grammar", grammar_path)->required();
    nonmember->add_option("--max-len", max_len)->required();

    auto* reduce = app.add_subcommand("reduce", "rewrite to a two-name or one-name vocabulary");
    reduce->add_option("--expr", expr_path)->required();
    reduce->add_option("--names", names_csv)->required();
    reduce->add_option("--to", to)->required()->check(CLI::IsMember({"two", "one"}));
    reduce->add_option("--out", out_path)->required();
    reduce->add_option("--model-in", model_in);
    reduce->add_option("--model-out", model_out);

    auto* dimacs = app.add_subcommand("dimacs", "export the propositional encoding");
    dimacs->add_option("--expr", expr_path)->required();
    dimacs->add_option("--size", size)->required();
    dimacs->add_option("--out", out_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(eval)) return run_eval(expr_path, structure_path, strategy);
        if (app.got_subcommand(sat))
            return run_sat(expr_path, max_size, backend, budget_ms, dimacs_out);
        if (app.got_subcommand(degree)) return run_degree(expr_path);
        if (app.got_subcommand(cfg2da)) return run_cfg2da(grammar_path, out_path);
        if (app.got_subcommand(witness)) return run_witness(grammar_path, word_text, out_path);
        if (app.got_subcommand(nonmember)) return run_nonmember(grammar_path, max_len);
        if (app.got_subcommand(reduce))
            return run_reduce(expr_path, names_csv, to, out_path, model_in, model_out);
        if (app.got_subcommand(dimacs)) return run_dimacs(expr_path, size, out_path);
    } catch (const da::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
