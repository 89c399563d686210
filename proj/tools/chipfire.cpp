// chipfire: command-line front door for the growth-model laboratory.
// Every subcommand prints a CSV header plus one data row on stdout; output
// is a pure function of flags (and the seed for idla), so reruns are
// byte-identical.

#include <CLI11.hpp>
#include <json.hpp>

#include "chipfire/algebra.hpp"
#include "chipfire/divisible.hpp"
#include "chipfire/idla.hpp"
#include "chipfire/obstacle.hpp"
#include "chipfire/render.hpp"
#include "chipfire/rotor.hpp"
#include "chipfire/sandpile.hpp"
#include "chipfire/smash.hpp"
#include "chipfire/tree.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using nlohmann::json;

// Flat JSON config files: {"flag": value, ...} maps to --flag value.
class JsonConfig : public CLI::Config {
  public:
    std::string to_config(const CLI::App*, bool, bool,
                          std::string) const override {
        return "{}\n";
    }
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        input >> j;
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            item.name = key;
            if (value.is_array()) {
                for (const auto& el : value)
                    item.inputs.push_back(
                        el.is_string() ? el.get<std::string>() : el.dump());
            } else {
                item.inputs.push_back(
                    value.is_string() ? value.get<std::string>() : value.dump());
            }
            items.push_back(std::move(item));
        }
        return items;
    }
};

void enable_config(CLI::App* sub) {
    sub->set_config("--config", "", "JSON file with flag defaults");
    sub->config_formatter(std::make_shared<JsonConfig>());
}

void emit(const std::string& header, const std::string& row,
          const std::string& csv_path) {
    std::cout << header << "\n" << row << "\n";
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("cannot open " + csv_path);
        out << header << "\n" << row << "\n";
    }
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

chipfire::DomainSet square_domain(int size, int shift_x) {
    chipfire::DomainSet dom(
        chipfire::Box({shift_x, 0}, {shift_x + size - 1, size - 1}));
    chipfire::Point p(2);
    for (int x = shift_x; x < shift_x + size; ++x)
        for (int y = 0; y < size; ++y) {
            p[0] = x;
            p[1] = y;
            dom.insert(p);
        }
    return dom;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chipfire: growth models driven by chip-firing dynamics"};
    app.require_subcommand(1);

    std::string csv_path, render_path;
    int cell_px = 1;

    // divisible
    auto* divisible = app.add_subcommand(
        "divisible", "divisible sandpile point source");
    double div_mass = 400.0, div_tol = -1.0;
    int div_dim = 2;
    divisible->add_option("--mass,--m", div_mass, "total mass at the origin");
    divisible->add_option("--dim", div_dim, "lattice dimension");
    divisible->add_option("--tol", div_tol, "stop tolerance (<0: 1e-10 * mass)");
    enable_config(divisible);

    // rotor
    auto* rotor = app.add_subcommand("rotor", "rotor-router aggregation");
    std::int64_t rotor_n = 1000;
    int rotor_dim = 2;
    std::string rotor_order = "canonical";
    bool rotor_sequential = false;
    rotor->add_option("--n", rotor_n, "particle count");
    rotor->add_option("--dim", rotor_dim, "lattice dimension");
    rotor->add_option("--order", rotor_order,
                      "rotor direction order: canonical | clockwise")
        ->check(CLI::IsMember({"canonical", "clockwise"}));
    rotor->add_flag("--sequential", rotor_sequential,
                    "walk particles one at a time");
    enable_config(rotor);

    // sandpile
    auto* sandpile = app.add_subcommand("sandpile", "abelian sandpile growth");
    std::int64_t sp_n = 1000;
    int sp_hole = 0, sp_dim = 2;
    sandpile->add_option("--n", sp_n, "grains at the origin");
    sandpile->add_option("--hole", sp_hole, "hole depth H");
    sandpile->add_option("--dim", sp_dim, "lattice dimension");
    enable_config(sandpile);

    // idla
    auto* idla = app.add_subcommand("idla", "internal DLA aggregation");
    std::int64_t idla_n = 1000;
    int idla_dim = 2;
    std::uint64_t idla_seed = 1;
    idla->add_option("--n", idla_n, "particle count");
    idla->add_option("--dim", idla_dim, "lattice dimension");
    idla->add_option("--seed", idla_seed, "random walk seed");
    enable_config(idla);

    // smash
    auto* smash = app.add_subcommand("smash", "smash-sum experiments");
    std::string smash_model = "rotor";
    int smash_size = 40, smash_shift = 20;
    double smash_r = 2.0, smash_delta = 1.0 / 32.0;
    bool smash_quartic = false;
    std::uint64_t smash_seed = 1;
    smash->add_option("--model", smash_model, "divisible | rotor | idla")
        ->check(CLI::IsMember({"divisible", "rotor", "idla"}));
    smash->add_option("--size", smash_size, "square side length");
    smash->add_option("--shift", smash_shift, "overlap shift of square B");
    smash->add_flag("--quartic", smash_quartic,
                    "two-disk quartic boundary experiment");
    smash->add_option("--r", smash_r, "disk radius (quartic mode)");
    smash->add_option("--delta", smash_delta, "lattice spacing (quartic mode)");
    smash->add_option("--seed", smash_seed, "idla seed");
    enable_config(smash);

    // obstacle
    auto* obstacle = app.add_subcommand(
        "obstacle", "obstacle-problem ball check");
    double ob_mass = 20.0, ob_r = 3.0;
    int ob_dim = 2;
    obstacle->add_option("--mass", ob_mass, "density multiplier on the ball");
    obstacle->add_option("--r", ob_r, "source ball radius");
    obstacle->add_option("--dim", ob_dim, "lattice dimension");
    enable_config(obstacle);

    // tree
    auto* tree = app.add_subcommand("tree", "rotor walks on regular trees");
    int tree_d = 3, tree_r = 5, tree_configs = 5;
    std::uint64_t tree_seed = 1;
    std::string escape_word;
    tree->add_option("--degree", tree_d, "tree degree");
    tree->add_option("--radius", tree_r, "ball radius for the suite");
    tree->add_option("--configs", tree_configs, "random configurations");
    tree->add_option("--seed", tree_seed, "config seed");
    tree->add_option("--escape-word", escape_word,
                     "realize a binary escape word and round-trip it");
    enable_config(tree);

    // group
    auto* group = app.add_subcommand("group", "sandpile group of T_n");
    int grp_d = 3, grp_n = 3;
    group->add_option("--degree", grp_d, "tree degree");
    group->add_option("--tree-height", grp_n, "tree height n");
    enable_config(group);

    // render
    auto* render = app.add_subcommand("render", "rasterize a stored domain");
    std::string render_input;
    render->add_option("--input", render_input, "domain JSON file")
        ->required();
    enable_config(render);

    for (CLI::App* sub : {divisible, rotor, sandpile, idla, smash, obstacle,
                          tree, group, render}) {
        sub->add_option("--csv", csv_path, "also write the CSV to this file");
        sub->add_option("--render", render_path, "write a PPM image here");
        sub->add_option("--cell-px", cell_px, "pixels per lattice cell");
    }
    render->get_option("--render")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(divisible)) {
            chipfire::DivisibleOptions opts;
            opts.tol = div_tol;
            auto [state, report] = chipfire::point_source(div_mass, div_dim, opts);
            auto m = chipfire::shape_metrics(report.domain);
            double tol_eff = div_tol < 0 ? 1e-10 * div_mass : div_tol;
            emit("m,d,tol,volume,inradius,outradius,sweeps",
                 fmt(div_mass) + "," + std::to_string(div_dim) + "," +
                     fmt(tol_eff) + "," + std::to_string(m.volume) + "," +
                     fmt(m.inradius) + "," + fmt(m.outradius) + "," +
                     std::to_string(report.sweeps),
                 csv_path);
            if (!render_path.empty())
                chipfire::write_ppm(
                    chipfire::render_domain(report.domain, cell_px), render_path);
        } else if (app.got_subcommand(rotor)) {
            auto order = rotor_order == "clockwise"
                             ? chipfire::DirOrder::PaperClockwise2D
                             : chipfire::DirOrder::Canonical;
            chipfire::RotorRunOptions opts;
            opts.sequential = rotor_sequential;
            auto agg = chipfire::aggregate(
                rotor_n, chipfire::default_rotors(rotor_dim, order), opts);
            auto m = chipfire::shape_metrics(agg.occupied);
            emit("n,d,order,volume,inradius,outradius",
                 std::to_string(rotor_n) + "," + std::to_string(rotor_dim) +
                     "," + rotor_order + "," + std::to_string(m.volume) + "," +
                     fmt(m.inradius) + "," + fmt(m.outradius),
                 csv_path);
            if (!render_path.empty())
                chipfire::write_ppm(chipfire::render_rotors(agg, cell_px),
                                    render_path);
        } else if (app.got_subcommand(sandpile)) {
            auto state = chipfire::stabilize_chips(sp_n, sp_hole, sp_dim);
            chipfire::IntField initial(state.chips.box, -sp_hole);
            initial.ref(chipfire::Point(sp_dim, 0)) = sp_n - sp_hole;
            auto residual = chipfire::fire_count_identity_check(state, initial);
            auto m = chipfire::shape_metrics(state.visited);
            emit("n,H,d,visited,inradius,outradius,residual",
                 std::to_string(sp_n) + "," + std::to_string(sp_hole) + "," +
                     std::to_string(sp_dim) + "," + std::to_string(m.volume) +
                     "," + fmt(m.inradius) + "," + fmt(m.outradius) + "," +
                     std::to_string(residual),
                 csv_path);
            if (residual != 0)
                throw std::runtime_error("fire-count identity violated");
            if (!render_path.empty())
                chipfire::write_ppm(
                    chipfire::render_heights(state.chips, cell_px), render_path);
        } else if (app.got_subcommand(idla)) {
            auto result = chipfire::idla_aggregate(idla_n, idla_dim, idla_seed);
            auto m = chipfire::shape_metrics(result.occupied);
            emit("n,d,seed,volume,inradius,outradius",
                 std::to_string(idla_n) + "," + std::to_string(idla_dim) + "," +
                     std::to_string(idla_seed) + "," +
                     std::to_string(m.volume) + "," + fmt(m.inradius) + "," +
                     fmt(m.outradius),
                 csv_path);
            if (!render_path.empty())
                chipfire::write_ppm(
                    chipfire::render_domain(result.occupied, cell_px),
                    render_path);
        } else if (app.got_subcommand(smash)) {
            if (smash_quartic) {
                auto dom = chipfire::two_disk_domain(smash_r, smash_delta);
                auto stats = chipfire::quartic_residual(dom, smash_r, smash_delta);
                emit("r,delta,max_residual,median_residual,on_axis_crossing",
                     fmt(smash_r) + "," + fmt(smash_delta) + "," +
                         fmt(stats.max_residual) + "," +
                         fmt(stats.median_residual) + "," +
                         fmt(stats.on_axis_crossing),
                     csv_path);
                if (!render_path.empty())
                    chipfire::write_ppm(chipfire::render_domain(dom, cell_px),
                                        render_path);
            } else {
                auto A = square_domain(smash_size, 0);
                auto B = square_domain(smash_size, smash_shift);
                chipfire::DomainSet sum;
                if (smash_model == "rotor")
                    sum = chipfire::rotor_smash(A, B,
                                                chipfire::default_rotors(2));
                else if (smash_model == "idla")
                    sum = chipfire::df_smash(A, B, smash_seed);
                else
                    sum = chipfire::divisible_smash(A, B);
                emit("model,size,shift,cardA,cardB,cardSum",
                     smash_model + "," + std::to_string(smash_size) + "," +
                         std::to_string(smash_shift) + "," +
                         std::to_string(A.count) + "," +
                         std::to_string(B.count) + "," +
                         std::to_string(sum.count),
                     csv_path);
                if (!render_path.empty())
                    chipfire::write_ppm(chipfire::render_domain(sum, cell_px),
                                        render_path);
            }
        } else if (app.got_subcommand(obstacle)) {
            bool pass = chipfire::relax_ball_check(ob_mass, ob_r, ob_dim);
            emit("mass,r,d,pass",
                 fmt(ob_mass) + "," + fmt(ob_r) + "," + std::to_string(ob_dim) +
                     "," + (pass ? "1" : "0"),
                 csv_path);
            if (!pass) throw std::runtime_error("obstacle ball check failed");
        } else if (app.got_subcommand(tree)) {
            if (!escape_word.empty()) {
                auto cfg = chipfire::realize_escape_word(escape_word);
                std::string sim = chipfire::escape_sequence_branch(
                    cfg, static_cast<int>(escape_word.size()));
                emit("word,simulated,roundtrip",
                     escape_word + "," + sim + "," +
                         (sim == escape_word ? "1" : "0"),
                     csv_path);
                if (sim != escape_word)
                    throw std::runtime_error("escape word round trip failed");
            } else {
                auto rep = chipfire::tree_ball_theorem_suite(
                    tree_d, tree_r, tree_configs, tree_seed);
                emit("d,r,configs,seed,pass",
                     std::to_string(tree_d) + "," + std::to_string(tree_r) +
                         "," + std::to_string(rep.configs_checked) + "," +
                         std::to_string(tree_seed) + "," +
                         (rep.pass ? "1" : "0"),
                     csv_path);
                if (!rep.pass)
                    throw std::runtime_error("tree ball theorem check failed");
            }
        } else if (app.got_subcommand(group)) {
            auto dec = chipfire::smith_normal_form(chipfire::reduced_laplacian(
                chipfire::make_regular_tree(grp_d, grp_n)));
            std::string inv, elem;
            for (const auto& f : dec.invariant_factors)
                inv += (inv.empty() ? "" : " ") + f.get_str();
            for (const auto& f : dec.elementary_divisors())
                elem += (elem.empty() ? "" : " ") + f.get_str();
            emit("d,n,order,invariant_factors,elementary_divisors",
                 std::to_string(grp_d) + "," + std::to_string(grp_n) + "," +
                     dec.order.get_str() + "," + inv + "," + elem,
                 csv_path);
        } else if (app.got_subcommand(render)) {
            std::ifstream in(render_input);
            if (!in) throw std::runtime_error("cannot open " + render_input);
            std::stringstream buf;
            buf << in.rdbuf();
            auto dom = chipfire::domain_from_json(buf.str());
            chipfire::write_ppm(chipfire::render_domain(dom, cell_px),
                                render_path);
            emit("input,cells,output",
                 render_input + "," + std::to_string(dom.count) + "," +
                     render_path,
                 csv_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "chipfire: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
