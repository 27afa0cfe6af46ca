#include "mrm/program.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "mrm/error.hpp"

namespace mrm {
namespace {

std::vector<std::string> split(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + why);
}

struct RawRule {
  std::size_t line;
  std::string from;
  char read;
  std::string to;
  char write;
  Move move;
};

}  // namespace

MachineSpec parse_program(std::string_view text, std::string name) {
  std::vector<char> symbols;
  std::optional<char> blank;
  std::optional<std::string> start;
  std::vector<std::string> halting;
  std::vector<RawRule> rules;

  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto tokens = split(line);
    if (tokens.empty()) continue;

    if (auto colon = line.find(':'); colon != std::string::npos) {
      const auto key = split(line.substr(0, colon));
      const auto values = split(line.substr(colon + 1));
      if (key.size() != 1) fail(lineno, "malformed header");
      if (key[0] == "alphabet") {
        // "_ 0 1" or the compact "_01"
        for (const auto& v : values) {
          if (values.size() == 1) {
            symbols.insert(symbols.end(), v.begin(), v.end());
          } else if (v.size() == 1) {
            symbols.push_back(v[0]);
          } else {
            fail(lineno, "alphabet symbols must be single characters");
          }
        }
      } else if (key[0] == "blank") {
        if (values.size() != 1 || values[0].size() != 1) fail(lineno, "blank must be one character");
        blank = values[0][0];
      } else if (key[0] == "start") {
        if (values.size() != 1) fail(lineno, "start takes one state");
        start = values[0];
      } else if (key[0] == "halt") {
        if (values.empty()) fail(lineno, "halt needs at least one state");
        halting.insert(halting.end(), values.begin(), values.end());
      } else {
        fail(lineno, "unknown header '" + key[0] + "'");
      }
      continue;
    }

    if (tokens.size() != 6 || tokens[2] != "->") {
      fail(lineno, "expected '<state> <symbol> -> <state> <symbol> <L|R|S>'");
    }
    if (tokens[1].size() != 1 || tokens[4].size() != 1) fail(lineno, "symbols are single characters");
    if (tokens[5] != "L" && tokens[5] != "R" && tokens[5] != "S") fail(lineno, "move must be L, R or S");
    rules.push_back(RawRule{lineno, tokens[0], tokens[1][0], tokens[3], tokens[4][0],
                            static_cast<Move>(tokens[5][0])});
  }

  if (symbols.empty()) fail(lineno, "missing 'alphabet:' header");
  if (!blank) fail(lineno, "missing 'blank:' header");
  if (!start) fail(lineno, "missing 'start:' header");
  if (halting.empty()) fail(lineno, "missing 'halt:' header");

  std::vector<std::string> states;
  std::map<std::string, State> state_index;
  auto intern = [&](const std::string& s, std::size_t line) {
    if (auto it = state_index.find(s); it != state_index.end()) return it->second;
    if (states.size() >= MachineSpec::kMaxStates) fail(line, "too many states");
    state_index.emplace(s, static_cast<State>(states.size()));
    states.push_back(s);
    return static_cast<State>(states.size() - 1);
  };
  auto symbol_index = [&](char c, std::size_t line) {
    for (std::size_t k = 0; k < symbols.size(); ++k) {
      if (symbols[k] == c) return static_cast<Symbol>(k);
    }
    fail(line, std::string("symbol '") + c + "' is not in the alphabet");
  };

  const State start_state = intern(*start, 0);
  std::vector<State> halt_states;
  for (const auto& h : halting) halt_states.push_back(intern(h, 0));
  for (const auto& r : rules) {
    intern(r.from, r.line);
    intern(r.to, r.line);
  }

  std::vector<std::optional<Transition>> table(states.size() * symbols.size());
  for (const auto& r : rules) {
    const State from = state_index.at(r.from);
    const Symbol read = symbol_index(r.read, r.line);
    auto& slot = table[from * symbols.size() + read];
    if (slot) fail(r.line, "duplicate transition for (" + r.from + ", " + r.read + ")");
    for (State h : halt_states) {
      if (h == from) fail(r.line, "halting state '" + r.from + "' has a transition");
    }
    slot = Transition{state_index.at(r.to), symbol_index(r.write, r.line), r.move};
  }

  try {
    return MachineSpec(std::move(name), std::move(symbols), symbol_index(*blank, lineno),
                       std::move(states), start_state, std::move(halt_states), std::move(table));
  } catch (const Error& e) {
    fail(lineno, e.what());
  }
}

MachineSpec load_program(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_program(buffer.str(), path.stem().string());
}

}  // namespace mrm
