#include "chipfire/tree.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace chipfire;

TEST_SUITE_BEGIN("tree");

TEST_CASE("tree aggregate fills balls under acyclic configs") {
    auto order = tree_aggregate(10, random_acyclic_config(3, 6, 123));
    CHECK(order.size() == 10);
    CHECK(order[0] == "");
    // b_1 = 4: origin plus the three principal branch roots
    std::set<std::string> first4(order.begin(), order.begin() + 4);
    CHECK(first4 == std::set<std::string>{"", "1", "2", "3"});
    // b_2 = 10: everything within distance 2
    for (const auto& w : order) CHECK(w.size() <= 2);
}

TEST_CASE("is_acyclic") {
    CHECK(is_acyclic(uniform_config(3, 1), 6));  // all rotors to child 1
    // all-parent: the origin points at branch 3 and "3" points back
    CHECK_FALSE(is_acyclic(uniform_config(3, 3), 6));
    TreeConfig mutual = uniform_config(3, 1);
    mutual.overrides[""] = 1;
    mutual.overrides["1"] = 3;  // the pair ("", "1") points at each other
    CHECK_FALSE(is_acyclic(mutual, 6));
    for (std::uint64_t s = 0; s < 10; ++s)
        CHECK(is_acyclic(random_acyclic_config(3, 5, s), 6));
}

TEST_CASE("tree ball sizes") {
    CHECK(tree_ball_size(0, 3) == 1);
    CHECK(tree_ball_size(1, 3) == 4);
    CHECK(tree_ball_size(2, 3) == 10);
    CHECK(tree_ball_size(3, 4) == 53);
}

TEST_CASE("perfect ball suite small") {
    auto rep3 = tree_ball_theorem_suite(3, 4, 5, 2024);
    CHECK(rep3.pass);
    auto rep4 = tree_ball_theorem_suite(4, 3, 5, 2024);
    CHECK(rep4.pass);
}

TEST_CASE("finite branch runs") {
    // d=3, all rotors 1, height 4: 15 chips alternate b,o,b,...
    auto run = finite_branch_run(4, 3, uniform_config(3, 1), 15);
    CHECK(run.record == "bobobobobobobob");
    // one chip per leaf, (a^{n-1}-1)/(a-1) chips to o, rotors restored
    CHECK(run.leaf_hits.size() == 8);
    for (const auto& [leaf, hits] : run.leaf_hits) CHECK(hits == 1);
    CHECK(run.rotors_restored);

    // all rotors d-1: first n-1 chips return to o
    for (int d : {3, 4, 5}) {
        int height = 5;
        auto r = finite_branch_run(height, d, uniform_config(d, d - 1),
                                   height - 1);
        CHECK(r.record == std::string(height - 1, 'o'));
    }

    // height 2, rotor 2 at the root (d=3): first chip rotates to 3 = parent
    auto tiny = finite_branch_run(2, 3, uniform_config(3, 2), 1);
    CHECK(tiny.record == "o");
}

TEST_CASE("escape sequences") {
    CHECK(escape_sequence_branch(uniform_config(3, 2), 30) ==
          std::string(30, '0'));
    // alternation config: R(m) = floor(m/2) on the full tree
    std::string alt = escape_sequence_tree(alternation_config(), 200);
    int returns = 0;
    for (int m = 1; m <= 200; ++m) {
        if (alt[m - 1] == '0') ++returns;
        CHECK(returns == m / 2);
    }
    CHECK(check_all_Pk(alt));
}

TEST_CASE("P_k predicate") {
    CHECK(check_Pk("110", 2));
    CHECK_FALSE(check_Pk("111", 2));
    // brute-force window oracle on random words
    std::mt19937_64 rng(31);
    for (int t = 0; t < 50; ++t) {
        std::string w;
        for (int i = 0; i < 20; ++i) w.push_back(rng() % 2 ? '1' : '0');
        for (int k = 1; (1u << k) - 1 <= w.size(); ++k) {
            std::size_t window = (1u << k) - 1, cap = 1u << (k - 1);
            bool brute = true;
            for (std::size_t i = 0; i + window <= w.size(); ++i)
                if (static_cast<std::size_t>(std::count(
                        w.begin() + i, w.begin() + i + window, '1')) > cap)
                    brute = false;
            CHECK(check_Pk(w, k) == brute);
        }
    }
}

TEST_CASE("psi and phi") {
    CHECK(phi("1", "1") == "110");
    CHECK(psi("0") == std::pair<std::string, std::string>{"0", "0"});
    CHECK(psi("1010") == std::pair<std::string, std::string>{"10", "01"});
    // phi(psi(a)) = a up to one trailing zero, exhaustive length <= 12
    for (int len = 1; len <= 12; ++len)
        for (int bits = 0; bits < (1 << len); ++bits) {
            std::string a;
            for (int i = len - 1; i >= 0; --i)
                a.push_back((bits >> i) & 1 ? '1' : '0');
            if (!check_all_Pk(a) || !check_Pk(a, 2)) continue;
            auto [c, d] = psi(a);
            std::string back = phi(c, d);
            bool same = back == a || back == a + "0";
            CHECK(same);
        }
}

TEST_CASE("realize escape words round trip") {
    // exhaustive up to length 8
    int valid = 0;
    for (int len = 1; len <= 8; ++len) {
        int count_len = 0;
        for (int bits = 0; bits < (1 << len); ++bits) {
            std::string a;
            for (int i = len - 1; i >= 0; --i)
                a.push_back((bits >> i) & 1 ? '1' : '0');
            if (!check_all_Pk(a)) continue;
            ++valid;
            ++count_len;
            auto cfg = realize_escape_word(a);
            CHECK(escape_sequence_branch(cfg, len) == a);
        }
        // strings of length 4 with no "111" substring: tribonacci count 13
        if (len == 4) CHECK(count_len == 13);
    }
    CHECK(valid > 100);
    CHECK_THROWS(realize_escape_word("111"));
}

TEST_CASE("random config escape sequences satisfy P_k") {
    std::mt19937_64 rng(97);
    for (int t = 0; t < 25; ++t) {
        TreeConfig cfg;
        cfg.d = 3;
        cfg.defaults = {{"", static_cast<int>(rng() % 3) + 1}};
        int depth = 3;
        std::vector<std::string> frontier{""};
        for (int l = 0; l < depth; ++l) {
            std::vector<std::string> next;
            for (const auto& w : frontier)
                for (char c : {'1', '2'}) next.push_back(w + c);
            frontier = next;
            for (const auto& w : frontier)
                if (rng() % 2) cfg.overrides[w] = static_cast<int>(rng() % 3) + 1;
        }
        std::string word = escape_sequence_branch(cfg, 25);
        CHECK(check_all_Pk(word));
    }
}

TEST_SUITE_END();
