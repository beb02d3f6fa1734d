#include "dualband/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dualband/numerics.hpp"

namespace dualband {

namespace {

[[noreturn]] void fail(const std::string& name, std::size_t line, const std::string& what) {
    throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

double to_double(const std::string& v, const std::string& name, std::size_t line) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        fail(name, line, "malformed numeric value '" + v + "'");
    return out;
}

int to_int(const std::string& v, const std::string& name, std::size_t line) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        fail(name, line, "malformed integer value '" + v + "'");
    return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::vector<int> to_layout(const std::string& v, const std::string& name, std::size_t line) {
    std::vector<int> widths;
    for (const std::string& part : split_on(v, ',')) widths.push_back(to_int(part, name, line));
    return widths;
}

std::string layout_to_string(const std::vector<int>& layout) {
    std::string s;
    for (int w : layout) {
        if (!s.empty()) s += ",";
        s += std::to_string(w);
    }
    return s;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::validate() const {
    cell.validate();
    train.validate();
    train_gen.validate();
    space.validate();
    fixed_spec.validate();
    if (gamma_t < 0.0 || gamma_t > 1.0)
        throw std::invalid_argument("run config: gamma_t must lie in [0, 1]");
    if (n_cells < 1 || acceptance_cells < 1)
        throw std::invalid_argument("run config: cell counts must be positive");
    if (cv_repeats_acceptance < 1)
        throw std::invalid_argument("run config: cv_repeats_acceptance must be >= 1");
    if (n_groups < 1 || group_train < 1 || group_val < 1 || group_test < 1)
        throw std::invalid_argument("run config: group counts must be positive");
    if (external_train_fraction <= 0.0 || external_train_fraction >= 1.0)
        throw std::invalid_argument("run config: external_train_fraction must lie in (0, 1)");
    if (split.train_fraction <= 0.0 || split.train_fraction >= 1.0 ||
        split.validation_fraction_of_train <= 0.0 || split.validation_fraction_of_train >= 1.0)
        throw std::invalid_argument("run config: split fractions must lie in (0, 1)");
}

RunConfig parse_run_config_text(const std::string& text, const std::string& name) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::set<std::string> seen;
    // Each handler consumes the value string for one key.
    const std::map<std::string, std::function<void(const std::string&, std::size_t)>> handlers = {
        {"f_c", [&](const std::string& v, std::size_t l) { cfg.cell.f_c = to_double(v, name, l); }},
        {"f_m", [&](const std::string& v, std::size_t l) { cfg.cell.f_m = to_double(v, name, l); }},
        {"w_c", [&](const std::string& v, std::size_t l) { cfg.cell.w_c = to_double(v, name, l); }},
        {"w_m", [&](const std::string& v, std::size_t l) { cfg.cell.w_m = to_double(v, name, l); }},
        {"p_tx_c", [&](const std::string& v, std::size_t l) { cfg.cell.p_tx_c = to_double(v, name, l); }},
        {"p_tx_m", [&](const std::string& v, std::size_t l) { cfg.cell.p_tx_m = to_double(v, name, l); }},
        {"eps", [&](const std::string& v, std::size_t l) { cfg.cell.eps = to_double(v, name, l); }},
        {"d_break", [&](const std::string& v, std::size_t l) { cfg.cell.d_break = to_double(v, name, l); }},
        {"d_dcor_c", [&](const std::string& v, std::size_t l) { cfg.cell.d_dcor_c = to_double(v, name, l); }},
        {"d_dcor_m", [&](const std::string& v, std::size_t l) { cfg.cell.d_dcor_m = to_double(v, name, l); }},
        {"sigma_c", [&](const std::string& v, std::size_t l) { cfg.cell.sigma_c = to_double(v, name, l); }},
        {"sigma_m", [&](const std::string& v, std::size_t l) { cfg.cell.sigma_m = to_double(v, name, l); }},
        {"rho", [&](const std::string& v, std::size_t l) { cfg.cell.rho = to_double(v, name, l); }},
        {"noise_psd", [&](const std::string& v, std::size_t l) { cfg.cell.noise_psd = to_double(v, name, l); }},
        {"cell_side", [&](const std::string& v, std::size_t l) { cfg.cell.cell_side = to_double(v, name, l); }},
        {"n_points", [&](const std::string& v, std::size_t l) { cfg.cell.n_points = to_int(v, name, l); }},
        {"gamma_t", [&](const std::string& v, std::size_t l) { cfg.gamma_t = to_double(v, name, l); }},
        {"n_cells", [&](const std::string& v, std::size_t l) { cfg.n_cells = to_int(v, name, l); }},
        {"acceptance_cells",
         [&](const std::string& v, std::size_t l) { cfg.acceptance_cells = to_int(v, name, l); }},
        {"train_fraction",
         [&](const std::string& v, std::size_t l) { cfg.split.train_fraction = to_double(v, name, l); }},
        {"validation_fraction_of_train",
         [&](const std::string& v, std::size_t l) {
             cfg.split.validation_fraction_of_train = to_double(v, name, l);
         }},
        {"alpha", [&](const std::string& v, std::size_t l) { cfg.fixed_spec.alpha = to_double(v, name, l); }},
        {"hidden_layout",
         [&](const std::string& v, std::size_t l) { cfg.fixed_spec.hidden_layout = to_layout(v, name, l); }},
        {"gamma_grid_step",
         [&](const std::string& v, std::size_t l) { cfg.space.gamma_step = to_double(v, name, l); }},
        {"cv_repeats", [&](const std::string& v, std::size_t l) { cfg.space.cv_repeats = to_int(v, name, l); }},
        {"cv_repeats_acceptance",
         [&](const std::string& v, std::size_t l) { cfg.cv_repeats_acceptance = to_int(v, name, l); }},
        {"max_epochs", [&](const std::string& v, std::size_t l) { cfg.train.max_epochs = to_int(v, name, l); }},
        {"learning_rate",
         [&](const std::string& v, std::size_t l) { cfg.train.learning_rate = to_double(v, name, l); }},
        {"batch_size", [&](const std::string& v, std::size_t l) { cfg.train.batch_size = to_int(v, name, l); }},
        {"patience", [&](const std::string& v, std::size_t l) { cfg.train.patience = to_int(v, name, l); }},
        {"gen_max_epochs",
         [&](const std::string& v, std::size_t l) { cfg.train_gen.max_epochs = to_int(v, name, l); }},
        {"gen_patience",
         [&](const std::string& v, std::size_t l) { cfg.train_gen.patience = to_int(v, name, l); }},
        {"n_groups", [&](const std::string& v, std::size_t l) { cfg.n_groups = to_int(v, name, l); }},
        {"group_train", [&](const std::string& v, std::size_t l) { cfg.group_train = to_int(v, name, l); }},
        {"group_val", [&](const std::string& v, std::size_t l) { cfg.group_val = to_int(v, name, l); }},
        {"group_test", [&](const std::string& v, std::size_t l) { cfg.group_test = to_int(v, name, l); }},
        {"external_train_fraction",
         [&](const std::string& v, std::size_t l) { cfg.external_train_fraction = to_double(v, name, l); }},
        {"layout_grid",
         [&](const std::string& v, std::size_t l) {
             std::vector<std::vector<int>> layouts;
             for (const std::string& part : split_on(v, '|')) layouts.push_back(to_layout(part, name, l));
             cfg.space.layouts = layouts;
         }},
        {"alpha_grid",
         [&](const std::string& v, std::size_t l) {
             std::vector<double> alphas;
             for (const std::string& part : split_on(v, ',')) alphas.push_back(to_double(part, name, l));
             cfg.space.alphas = alphas;
         }},
    };
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(name, line_no, "expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = handlers.find(key);
        if (it == handlers.end()) fail(name, line_no, "unknown key '" + key + "'");
        if (!seen.insert(key).second) fail(name, line_no, "duplicate key '" + key + "'");
        if (value.empty()) fail(name, line_no, "empty value for key '" + key + "'");
        it->second(value, line_no);
        cfg.overrides.emplace_back(key, value);
    }
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw std::runtime_error(name + ": " + e.what());
    }
    return cfg;
}

RunConfig parse_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config_text(ss.str(), path);
}

std::string serialize_run_config(const RunConfig& cfg) {
    std::string s;
    const auto add = [&s](const std::string& k, const std::string& v) { s += k + "=" + v + "\n"; };
    const auto addd = [&](const std::string& k, double v) { add(k, format_double(v)); };
    const auto addi = [&](const std::string& k, int v) { add(k, std::to_string(v)); };
    addd("f_c", cfg.cell.f_c);
    addd("f_m", cfg.cell.f_m);
    addd("w_c", cfg.cell.w_c);
    addd("w_m", cfg.cell.w_m);
    addd("p_tx_c", cfg.cell.p_tx_c);
    addd("p_tx_m", cfg.cell.p_tx_m);
    addd("eps", cfg.cell.eps);
    addd("d_break", cfg.cell.d_break);
    addd("d_dcor_c", cfg.cell.d_dcor_c);
    addd("d_dcor_m", cfg.cell.d_dcor_m);
    addd("sigma_c", cfg.cell.sigma_c);
    addd("sigma_m", cfg.cell.sigma_m);
    addd("rho", cfg.cell.rho);
    addd("noise_psd", cfg.cell.noise_psd);
    addd("cell_side", cfg.cell.cell_side);
    addi("n_points", cfg.cell.n_points);
    addd("gamma_t", cfg.gamma_t);
    addi("n_cells", cfg.n_cells);
    addi("acceptance_cells", cfg.acceptance_cells);
    addd("train_fraction", cfg.split.train_fraction);
    addd("validation_fraction_of_train", cfg.split.validation_fraction_of_train);
    add("hidden_layout", layout_to_string(cfg.fixed_spec.hidden_layout));
    addd("alpha", cfg.fixed_spec.alpha);
    addd("gamma_grid_step", cfg.space.gamma_step);
    addi("cv_repeats", cfg.space.cv_repeats);
    addi("cv_repeats_acceptance", cfg.cv_repeats_acceptance);
    addi("max_epochs", cfg.train.max_epochs);
    addd("learning_rate", cfg.train.learning_rate);
    addi("batch_size", cfg.train.batch_size);
    addi("patience", cfg.train.patience);
    addi("gen_max_epochs", cfg.train_gen.max_epochs);
    addi("gen_patience", cfg.train_gen.patience);
    addi("n_groups", cfg.n_groups);
    addi("group_train", cfg.group_train);
    addi("group_val", cfg.group_val);
    addi("group_test", cfg.group_test);
    addd("external_train_fraction", cfg.external_train_fraction);
    std::string layouts;
    for (const auto& layout : cfg.space.layouts) {
        if (!layouts.empty()) layouts += "|";
        layouts += layout_to_string(layout);
    }
    add("layout_grid", layouts);
    std::string alphas;
    for (double a : cfg.space.alphas) {
        if (!alphas.empty()) alphas += ",";
        alphas += format_double(a);
    }
    add("alpha_grid", alphas);
    return s;
}

}  // namespace dualband
