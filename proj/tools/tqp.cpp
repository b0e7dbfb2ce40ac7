#include "tqp/automaton_io.hpp"
#include "tqp/errors.hpp"
#include "tqp/oracle.hpp"
#include "tqp/preservation.hpp"
#include "tqp/query.hpp"
#include "tqp/transducer.hpp"
#include "tqp/tree_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace tqp;
using Json = nlohmann::ordered_json;

namespace {

enum Exit { kYes = 0, kNo = 1, kUsage = 2, kBudget = 3 };

/// Error already carrying its file location.
struct LocatedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string query;
    std::string transducer;
    std::string output;
    std::string tree;
    std::string format = "text";
    std::size_t budget = kDefaultStateBudget;
    std::size_t max_size = 8;
    std::uint64_t first_value = 1;
    bool timing = false;
    std::vector<std::string> files;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LocatedError(path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class F>
auto located(const std::string& source, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        std::ostringstream os;
        os << source;
        if (e.line()) os << ':' << e.line() << ':' << e.column();
        os << ": " << e.what();
        throw LocatedError(os.str());
    } catch (const ValidationError& e) {
        throw LocatedError(source + ": " + e.what());
    }
}

Query load_query(const std::string& path) {
    if (path.empty()) throw CLI::ValidationError("-q", "a query file is required");
    auto text = slurp(path);
    return located(path, [&] { return parse_query(text); });
}

Transducer load_transducer(const std::string& path) {
    if (path.empty()) throw CLI::ValidationError("-t", "a transducer file is required");
    auto text = slurp(path);
    return located(path, [&] { return parse_transducer(text); });
}

TreeAutomaton load_automaton(const std::string& path) {
    auto text = slurp(path);
    return located(path, [&] { return parse_automaton(text); });
}

Tree load_tree(const std::string& text, const RankedAlphabet& alphabet) {
    return located("<tree>", [&] { return parse_tree(text, alphabet); });
}

Json sizes_json(const SizeReport& sizes) {
    Json j = Json::object();
    for (const auto& [k, v] : sizes) j[k] = v;
    return j;
}

Json value_tuples_json(const std::set<ValueTuple>& tuples) {
    Json j = Json::array();
    for (const auto& t : tuples) {
        Json row = Json::array();
        for (const auto& v : t) row.push_back(v.str());
        j.push_back(row);
    }
    return j;
}

Json weak_witness_json(const WeakWitness& w) {
    Json j;
    j["tuple"] = w.tuple;
    j["query_state"] = w.query_state;
    j["transducer_state"] = w.transducer_state;
    j["product_state"] = w.product_state;
    j["kind"] = to_string(w.kind);
    if (!w.symbol.empty()) j["symbol"] = w.symbol;
    j["tree"] = to_string(w.tree);
    j["position"] = w.position.to_string();
    return j;
}

Json oracle_json(const OracleReport& r) {
    Json j;
    j["check"] = r.check;
    j["checked"] = r.checked;
    j["pass"] = r.pass();
    auto list = [](const std::vector<Discrepancy>& ds) {
        Json a = Json::array();
        for (const auto& d : ds) a.push_back(Json{{"input", d.input}, {"expected", d.expected}, {"actual", d.actual}});
        return a;
    };
    j["discrepancies"] = list(r.discrepancies);
    j["warnings"] = list(r.warnings);
    return j;
}

void render_text(std::ostream& os, const Json& j, int indent) {
    const std::string pad(indent, ' ');
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string key = it.key();
        std::replace(key.begin(), key.end(), '_', ' ');
        const Json& v = it.value();
        if (v.is_object()) {
            os << pad << key << ":\n";
            render_text(os, v, indent + 2);
        } else if (v.is_array()) {
            os << pad << key << ":" << (v.empty() ? " none" : "") << '\n';
            for (const auto& item : v) {
                if (item.is_object()) {
                    os << pad << "  -\n";
                    render_text(os, item, indent + 4);
                } else {
                    os << pad << "  - " << (item.is_string() ? item.get<std::string>() : item.dump()) << '\n';
                }
            }
        } else if (v.is_boolean()) {
            os << pad << key << ": " << (v.get<bool>() ? "yes" : "no") << '\n';
        } else if (v.is_string() && v.get<std::string>().find('\n') != std::string::npos) {
            os << pad << key << ":\n";
            std::istringstream lines(v.get<std::string>());
            for (std::string line; std::getline(lines, line);) os << pad << "  " << line << '\n';
        } else if (v.is_string()) {
            os << pad << key << ": " << v.get<std::string>() << '\n';
        } else {
            os << pad << key << ": " << v.dump() << '\n';
        }
    }
}

void emit(const Options& opt, Json doc, std::chrono::steady_clock::time_point start) {
    if (opt.timing) {
        auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        doc["elapsed_ms"] = static_cast<std::int64_t>(ms);
    }
    if (opt.format == "json")
        std::cout << doc.dump(2) << '\n';
    else
        render_text(std::cout, doc, 0);
}

// ---------------------------------------------------------------- commands

int cmd_eval(const Options& opt, Json& doc) {
    Query q = load_query(opt.query);
    Tree t = load_tree(opt.tree, q.automaton().alphabet());
    auto pos = eval(q, t);
    Json positions = Json::array();
    for (const auto& tuple : pos) {
        Json row = Json::array();
        for (const auto& p : tuple) row.push_back(p.to_string());
        positions.push_back(row);
    }
    doc["positions"] = format_position_tuples(pos);
    if (t.is_proper()) doc["values"] = format_value_tuples(eval_values(q, t));
    if (opt.format == "json") {
        doc["positions"] = positions;
        if (t.is_proper()) doc["values"] = value_tuples_json(eval_values(q, t));
    }
    return kYes;
}

int cmd_apply(const Options& opt, Json& doc) {
    Transducer tr = load_transducer(opt.transducer);
    Tree t = load_tree(opt.tree, tr.input_alphabet());
    if (!t.is_proper()) throw ImproperInput("apply requires a tree in which every node has a value");
    auto trace = apply_traced(tr, t);
    if (!trace.output) {
        doc["in_domain"] = false;
        doc["stuck_at"] = trace.stuck_at->to_string();
        doc["state"] = trace.stuck_state;
        return kNo;
    }
    doc["in_domain"] = true;
    doc["output"] = to_string(*trace.output);
    return kYes;
}

int cmd_check_weak(const Options& opt, Json& doc) {
    Query q = load_query(opt.query);
    Transducer tr = widen_input(load_transducer(opt.transducer), q.automaton().alphabet());
    WeakDecision d = q.arity() == 1 ? weak_preserves_unary(q, tr) : weak_preserves(q, tr);
    doc["weakly_preserves"] = d.preserved;
    Json ws = Json::array();
    for (const auto& w : d.witnesses) ws.push_back(weak_witness_json(w));
    doc["witnesses"] = ws;
    doc["sizes"] = sizes_json(d.sizes);
    return d.preserved ? kYes : kNo;
}

int cmd_check_strong(const Options& opt, Json& doc) {
    Query q = load_query(opt.query);
    Transducer tr = widen_input(load_transducer(opt.transducer), q.automaton().alphabet());
    StrongDecision d = strong_preserves(q, tr, opt.budget);
    doc["preserves"] = d.preserved;
    if (d.weak) {
        doc["weakly_preserves"] = false;
        Json ws = Json::array();
        for (const auto& w : d.weak->witnesses) ws.push_back(weak_witness_json(w));
        doc["witnesses"] = ws;
    }
    if (d.marked_witness) doc["witness"] = to_string(*d.marked_witness);
    if (d.collision) {
        doc["collision"] = Json{{"first", to_string(d.collision->first)},
                                {"second", to_string(d.collision->second)},
                                {"first_image", to_string(apply(tr, d.collision->first))},
                                {"second_image", to_string(apply(tr, d.collision->second))},
                                {"first_answer", format_value_tuples(eval_values(q, d.collision->first))},
                                {"second_answer", format_value_tuples(eval_values(q, d.collision->second))}};
    }
    doc["sizes"] = sizes_json(d.sizes);
    return d.preserved ? kYes : kNo;
}

int cmd_construct(const Options& opt, Json& doc) {
    Query q = load_query(opt.query);
    Transducer tr = widen_input(load_transducer(opt.transducer), q.automaton().alphabet());
    WeakDecision d = q.arity() == 1 ? weak_preserves_unary(q, tr) : weak_preserves(q, tr);
    if (!d.preserved) {
        doc["weakly_preserves"] = false;
        Json ws = Json::array();
        for (const auto& w : d.witnesses) ws.push_back(weak_witness_json(w));
        doc["witnesses"] = ws;
        return kNo;
    }
    SizeReport sizes;
    Query target = construct_weak_query(q, tr, &sizes);
    std::string text = format_query(target);
    doc["weakly_preserves"] = true;
    if (opt.output.empty()) {
        doc["query"] = text;
    } else {
        std::ofstream out(opt.output, std::ios::binary);
        if (!out) throw LocatedError(opt.output + ": cannot write file");
        out << text;
        doc["written"] = opt.output;
    }
    doc["sizes"] = sizes_json(sizes);
    return kYes;
}

int cmd_automaton(const std::string& sub, const Options& opt, Json& doc) {
    auto need = [&](std::size_t n) {
        if (opt.files.size() != n)
            throw CLI::ValidationError("automaton " + sub, "expects " + std::to_string(n) + " automaton file(s)");
    };
    if (sub == "reduce" || sub == "complement" || sub == "empty") {
        need(1);
        TreeAutomaton a = load_automaton(opt.files[0]);
        if (sub == "empty") {
            bool empty = is_empty(a);
            doc["empty"] = empty;
            if (!empty) doc["witness"] = to_string(*shortest_tree(a.has_epsilon() ? eliminate_epsilon(a) : a));
            return empty ? kYes : kNo;
        }
        TreeAutomaton r = sub == "reduce" ? (a.has_epsilon() ? eliminate_epsilon(a) : reduce(a)) : complement(a, opt.budget);
        doc["automaton"] = format_automaton(r);
        doc["states"] = r.state_count();
        doc["rules"] = r.rules().size();
        return kYes;
    }
    need(2);
    TreeAutomaton a = load_automaton(opt.files[0]);
    TreeAutomaton b = load_automaton(opt.files[1]);
    if (sub == "equiv") {
        LanguageCheck c = equivalent(a, b, opt.budget);
        doc["equivalent"] = c.holds;
        if (c.counterexample) {
            doc["witness"] = to_string(*c.counterexample);
            doc["accepted_by"] = accepts(a, *c.counterexample) ? opt.files[0] : opt.files[1];
        }
        return c.holds ? kYes : kNo;
    }
    TreeAutomaton r = sub == "product" ? product(a, b) : union_of(a, b);
    doc["automaton"] = format_automaton(r);
    doc["states"] = r.state_count();
    doc["rules"] = r.rules().size();
    return kYes;
}

int cmd_oracle(const std::string& sub, const Options& opt, Json& doc) {
    EnumerationBudget eb;
    eb.max_nodes = opt.max_size;
    eb.first_value = opt.first_value;
    if (sub == "eval") {
        Query q = load_query(opt.query);
        auto r = check_eval_equivalence(q, eb);
        doc["report"] = oracle_json(r);
        return r.pass() ? kYes : kNo;
    }
    Query q = load_query(opt.query);
    Transducer tr = widen_input(load_transducer(opt.transducer), q.automaton().alphabet());
    if (sub == "weak") {
        Query target = construct_weak_query(q, tr);
        auto r = check_weak_equation(q, tr, target, eb);
        doc["report"] = oracle_json(r);
        return r.pass() ? kYes : kNo;
    }
    if (sub == "strong") {
        auto pair = check_strong_counterexample(q, tr, eb);
        doc["counterexample_found"] = pair.has_value();
        if (pair) {
            doc["first"] = to_string(pair->first);
            doc["second"] = to_string(pair->second);
            doc["first_image"] = to_string(apply(tr, pair->first));
            doc["second_image"] = to_string(apply(tr, pair->second));
            doc["first_answer"] = format_value_tuples(eval_values(q, pair->first));
            doc["second_answer"] = format_value_tuples(eval_values(q, pair->second));
        }
        return pair ? kNo : kYes;
    }
    // language: type inference and deletion automaton against brute force
    const TreeAutomaton& a = q.automaton();
    Transducer plain = strip_transducer(tr);
    TreeAutomaton fwd = forward_type(a, plain);
    auto r1 = check_language_construction(
        "forward-type", fwd, [&](const Tree& s) { return has_preimage(a, plain, s); }, tr.output_alphabet(), eb);
    TreeAutomaton inv = inverse_type(fwd, plain);
    auto r2 = check_language_construction(
        "inverse-type", inv,
        [&](const Tree& t) {
            try {
                return accepts(fwd, apply_shape(plain, t));
            } catch (const NotInDomain&) {
                return false;
            }
        },
        tr.input_alphabet(), eb);
    TreeAutomaton dom = domain_automaton(tr);
    auto r3 = check_language_construction(
        "domain", dom,
        [&](const Tree& t) { return apply_traced(tr, t).output.has_value(); }, tr.input_alphabet(), eb);
    Json reports = Json::array({oracle_json(r1), oracle_json(r2), oracle_json(r3)});
    doc["reports"] = reports;
    return r1.pass() && r2.pass() && r3.pass() ? kYes : kNo;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Query preservation checks for deterministic linear tree transducers"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"text", "json"}));
        c->add_option("--budget", opt.budget, "Cap on macrostates created by subset constructions");
        c->add_option("--max-size", opt.max_size, "Largest tree size enumerated by oracles");
        c->add_flag("--timing", opt.timing, "Include elapsed time in the report");
    };
    auto add_q = [&](CLI::App* c) { c->add_option("-q,--query", opt.query, "Query file"); };
    auto add_t = [&](CLI::App* c) { c->add_option("-t,--transducer", opt.transducer, "Transducer file"); };

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a query on a tree");
    add_q(eval_cmd);
    eval_cmd->add_option("tree", opt.tree, "Tree, e.g. '(f @1 (a @2) (a @3))'")->required();
    add_common(eval_cmd);

    auto* apply_cmd = app.add_subcommand("apply", "Run a transducer on a proper tree");
    add_t(apply_cmd);
    apply_cmd->add_option("tree", opt.tree, "Proper input tree")->required();
    add_common(apply_cmd);

    auto* weak_cmd = app.add_subcommand("check-weak", "Decide weak preservation");
    add_q(weak_cmd);
    add_t(weak_cmd);
    add_common(weak_cmd);

    auto* strong_cmd = app.add_subcommand("check-strong", "Decide preservation");
    add_q(strong_cmd);
    add_t(strong_cmd);
    add_common(strong_cmd);

    auto* construct_cmd = app.add_subcommand("construct", "Build the target query");
    add_q(construct_cmd);
    add_t(construct_cmd);
    construct_cmd->add_option("-o,--output", opt.output, "Write the query here instead of the report");
    add_common(construct_cmd);

    auto* aut_cmd = app.add_subcommand("automaton", "Automaton operations");
    aut_cmd->require_subcommand(1);
    for (auto [name, help] : {std::pair{"reduce", "Drop useless states"}, {"product", "Intersection of all files"},
                              {"union", "Union of all files"}, {"complement", "Complement of one file"},
                              {"equiv", "Language equality of two files"}, {"empty", "Emptiness of one file"}}) {
        auto* c = aut_cmd->add_subcommand(name, help);
        c->add_option("files", opt.files, "Automaton files")->required();
        add_common(c);
    }

    auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force checks on enumerated trees");
    oracle_cmd->require_subcommand(1);
    for (auto [name, help] : {std::pair{"eval", "Both evaluation paths agree"},
                              {"weak", "Target query against pulled-back answers"},
                              {"strong", "Search for a collision pair"},
                              {"language", "Forward and inverse types against apply"}}) {
        auto* c = oracle_cmd->add_subcommand(name, help);
        add_q(c);
        add_t(c);
        c->add_option("--first-value", opt.first_value, "Value given to the root of enumerated trees");
        add_common(c);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    auto start = std::chrono::steady_clock::now();
    Json doc;
    int code = kYes;
    try {
        if (eval_cmd->parsed()) {
            doc["command"] = "eval";
            code = cmd_eval(opt, doc);
        } else if (apply_cmd->parsed()) {
            doc["command"] = "apply";
            code = cmd_apply(opt, doc);
        } else if (weak_cmd->parsed()) {
            doc["command"] = "check-weak";
            code = cmd_check_weak(opt, doc);
        } else if (strong_cmd->parsed()) {
            doc["command"] = "check-strong";
            code = cmd_check_strong(opt, doc);
        } else if (construct_cmd->parsed()) {
            doc["command"] = "construct";
            code = cmd_construct(opt, doc);
        } else if (aut_cmd->parsed()) {
            auto* sub = aut_cmd->get_subcommands().front();
            doc["command"] = "automaton " + sub->get_name();
            code = cmd_automaton(sub->get_name(), opt, doc);
        } else {
            auto* sub = oracle_cmd->get_subcommands().front();
            doc["command"] = "oracle " + sub->get_name();
            code = cmd_oracle(sub->get_name(), opt, doc);
        }
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return kBudget;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const LocatedError& e) {
        std::cerr << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    emit(opt, std::move(doc), start);
    return code;
}
