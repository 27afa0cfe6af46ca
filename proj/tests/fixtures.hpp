#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing here
// may call into the code path it is used to check.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mrm/machine.hpp"
#include "mrm/program.hpp"

namespace mrm::testing {

inline MachineSpec fixture(const std::string& name) {
  return load_program(std::string(MRM_PROGRAMS_DIR) + "/" + name + ".tm");
}

inline MachineSpec unary() { return fixture("unary_increment"); }
inline MachineSpec binary_add() { return fixture("binary_add"); }
inline MachineSpec palindrome() { return fixture("palindrome"); }

inline MachineSpec halt_immediately() {
  return parse_program("alphabet: _ 1\nblank: _\nstart: qh\nhalt: qh\n", "halt_immediately");
}

/// Machine that bounces between cell 1 and cell `width` for `rounds` round
/// trips, then idles through `pad` stay-steps and halts. Used to hit an exact
/// running time. Input must be "<" followed by width-2 blanks and ">".
inline std::string timer_program(int rounds, int pad) {
  std::string p = "alphabet: _ < >\nblank: _\nstart: R0\nhalt: H\n";
  auto rule = [&](const std::string& q, char s, const std::string& to, char w, char m) {
    p += q + " " + s + " -> " + to + " " + w + " " + m + "\n";
  };
  for (int k = 0; k < rounds; ++k) {
    const std::string r = "R" + std::to_string(k), l = "L" + std::to_string(k);
    const std::string next = k + 1 < rounds ? "R" + std::to_string(k + 1) : (pad > 0 ? "P0" : "H");
    rule(r, '<', r, '<', 'R');
    rule(r, '_', r, '_', 'R');
    rule(r, '>', l, '>', 'L');
    rule(l, '_', l, '_', 'L');
    rule(l, '>', l, '>', 'L');
    rule(l, '<', next, '<', 'S');
  }
  for (int k = 0; k < pad; ++k) {
    const std::string q = "P" + std::to_string(k);
    const std::string next = k + 1 < pad ? "P" + std::to_string(k + 1) : "H";
    for (char s : {'_', '<', '>'}) rule(q, s, next, s, 'S');
  }
  return p;
}

inline std::string timer_input(int width) { return "<" + std::string(width - 2, '_') + ">"; }

// --- naive interpreter: whole-tape copies, no shared code with step()

struct Config {
  std::vector<Symbol> tape;
  std::size_t pos;  // 0-based
  State state;
};

inline Row to_row(const Config& c, std::size_t index) {
  Row r{index, {}};
  for (std::size_t k = 0; k < c.tape.size(); ++k) {
    r.cells.push_back(Cell{c.tape[k], k == c.pos ? std::optional<State>(c.state) : std::nullopt});
  }
  return r;
}

/// All configurations until (and including) the first halting one, or until
/// `limit` configurations exist.
inline std::vector<Config> naive_run(const MachineSpec& spec, const std::string& input,
                                     std::size_t columns, std::size_t limit) {
  Config c{std::vector<Symbol>(columns, spec.blank()), 0, spec.start()};
  for (std::size_t k = 0; k < input.size(); ++k) c.tape[k] = *spec.symbol_of(input[k]);
  std::vector<Config> out{c};
  while (!spec.is_halting(out.back().state) && out.size() < limit) {
    Config n = out.back();
    const Transition& tr = spec.transition(n.state, n.tape[n.pos]);
    n.tape[n.pos] = tr.write;
    n.state = tr.next;
    if (tr.move == Move::Left) --n.pos;
    if (tr.move == Move::Right) ++n.pos;
    out.push_back(n);
  }
  return out;
}

inline bool is_palindrome(const std::string& s) {
  return std::equal(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(s.size() / 2), s.rbegin());
}

inline std::string random_ab(std::mt19937& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::bernoulli_distribution coin(0.5);
  std::string s(len(rng), 'a');
  for (auto& c : s) c = coin(rng) ? 'a' : 'b';
  return s;
}

}  // namespace mrm::testing
