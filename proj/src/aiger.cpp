#include "lsopt/aiger.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace lsopt {

namespace {

class Reader {
public:
  explicit Reader(std::string_view bytes) : data_(bytes) {}

  bool at_end() const { return pos_ >= data_.size(); }

  std::string_view line() {
    if (at_end()) throw AigerError("unexpected end of file");
    const auto end = data_.find('\n', pos_);
    const auto stop = end == std::string_view::npos ? data_.size() : end;
    auto result = data_.substr(pos_, stop - pos_);
    pos_ = end == std::string_view::npos ? data_.size() : end + 1;
    if (!result.empty() && result.back() == '\r') result.remove_suffix(1);
    return result;
  }

  std::uint32_t varint() {
    std::uint32_t value = 0;
    int shift = 0;
    while (true) {
      if (at_end()) throw AigerError("truncated binary and2 section");
      const auto byte = static_cast<unsigned char>(data_[pos_++]);
      value |= static_cast<std::uint32_t>(byte & 0x7f) << shift;
      if ((byte & 0x80) == 0) break;
      shift += 7;
      if (shift > 28) throw AigerError("binary delta overflows 32 bits");
    }
    return value;
  }

private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::vector<std::uint32_t> parse_numbers(std::string_view text) {
  std::vector<std::uint32_t> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    if (i >= text.size()) break;
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), value);
    if (ec != std::errc()) throw AigerError("malformed number in line '" + std::string(text) + "'");
    i = static_cast<std::size_t>(ptr - text.data());
    if (i < text.size() && text[i] != ' ') {
      throw AigerError("malformed number in line '" + std::string(text) + "'");
    }
    out.push_back(value);
  }
  return out;
}

std::uint32_t single_number(std::string_view text) {
  const auto v = parse_numbers(text);
  if (v.size() != 1) throw AigerError("expected one literal, got '" + std::string(text) + "'");
  return v.front();
}

struct Header {
  bool binary = false;
  std::uint32_t max_var = 0, inputs = 0, latches = 0, outputs = 0, ands = 0;
};

Header parse_header(std::string_view text) {
  Header h;
  if (text.starts_with("aag ")) {
    h.binary = false;
  } else if (text.starts_with("aig ")) {
    h.binary = true;
  } else {
    throw AigerError("malformed header: expected 'aag' or 'aig'");
  }
  const auto fields = parse_numbers(text.substr(4));
  if (fields.size() < 5) throw AigerError("malformed header: expected M I L O A");
  h.max_var = fields[0];
  h.inputs = fields[1];
  h.latches = fields[2];
  h.outputs = fields[3];
  h.ands = fields[4];
  if (h.latches != 0) throw AigerError("sequential unsupported: latch count must be 0");
  for (std::size_t i = 5; i < fields.size(); ++i) {
    if (fields[i] != 0) throw AigerError("sequential unsupported: B/C/J/F sections present");
  }
  if (static_cast<std::uint64_t>(h.inputs) + h.ands > h.max_var) {
    throw AigerError("malformed header: M < I + L + A");
  }
  return h;
}

// Resolves and2 definitions (possibly out of order in ASCII files) into the
// builder, in file order, detecting cycles and undefined literals.
class Resolver {
public:
  Resolver(AigBuilder& builder, std::uint32_t max_var)
      : builder_(builder), map_(max_var + 1), state_(max_var + 1, State::undefined),
        defs_(max_var + 1) {
    map_[0] = Lit::const0();
    state_[0] = State::done;
  }

  void define_input(std::uint32_t lit) {
    check_lit(lit);
    if (lit & 1u || lit == 0) throw AigerError("input literal must be positive and even");
    const auto var = lit >> 1;
    if (state_[var] != State::undefined) throw AigerError("literal defined twice");
    map_[var] = builder_.add_input();
    state_[var] = State::done;
  }

  void define_and(std::uint32_t lhs, std::uint32_t rhs0, std::uint32_t rhs1) {
    check_lit(lhs);
    check_lit(rhs0);
    check_lit(rhs1);
    if (lhs & 1u || lhs == 0) throw AigerError("and2 output literal must be positive and even");
    const auto var = lhs >> 1;
    if (state_[var] != State::undefined) throw AigerError("literal defined twice");
    state_[var] = State::pending;
    defs_[var] = {rhs0, rhs1};
    order_.push_back(var);
  }

  void resolve_all() {
    for (auto var : order_) resolve(var);
  }

  Lit lit(std::uint32_t raw) const {
    check_lit(raw);
    const auto var = raw >> 1;
    if (state_[var] != State::done) throw AigerError("dangling literal " + std::to_string(raw));
    return map_[var] ^ ((raw & 1u) != 0);
  }

private:
  enum class State { undefined, pending, active, done };

  void check_lit(std::uint32_t raw) const {
    if ((raw >> 1) >= map_.size()) {
      throw AigerError("literal " + std::to_string(raw) + " exceeds maximum variable index");
    }
  }

  void resolve(std::uint32_t root) {
    std::vector<std::uint32_t> stack{root};
    while (!stack.empty()) {
      const auto var = stack.back();
      if (state_[var] == State::done) {
        stack.pop_back();
        continue;
      }
      if (state_[var] == State::undefined) {
        throw AigerError("dangling literal " + std::to_string(var * 2));
      }
      state_[var] = State::active;
      bool ready = true;
      for (auto raw : {defs_[var].first, defs_[var].second}) {
        const auto child = raw >> 1;
        if (state_[child] == State::done) continue;
        if (state_[child] == State::active) throw AigerError("combinational cycle through literal " + std::to_string(raw));
        if (state_[child] == State::undefined) throw AigerError("dangling literal " + std::to_string(raw));
        stack.push_back(child);
        ready = false;
        break;
      }
      if (!ready) continue;
      map_[var] = builder_.add_and(lit(defs_[var].first), lit(defs_[var].second));
      state_[var] = State::done;
      stack.pop_back();
    }
  }

  AigBuilder& builder_;
  std::vector<Lit> map_;
  std::vector<State> state_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> defs_;
  std::vector<std::uint32_t> order_;
};

std::string read_name(Reader& reader) {
  // Symbol table lines are skipped; the first comment line names the circuit.
  while (!reader.at_end()) {
    const auto text = reader.line();
    if (text == "c") {
      return reader.at_end() ? std::string{} : std::string(reader.line());
    }
  }
  return {};
}

void encode_varint(std::string& out, std::uint32_t value) {
  while (value & ~0x7fu) {
    out.push_back(static_cast<char>((value & 0x7f) | 0x80));
    value >>= 7;
  }
  out.push_back(static_cast<char>(value));
}

std::string header_line(const char* tag, const Aig& aig) {
  std::ostringstream os;
  os << tag << ' ' << aig.num_inputs() + aig.num_ands() << ' ' << aig.num_inputs() << " 0 "
     << aig.num_outputs() << ' ' << aig.num_ands() << '\n';
  return os.str();
}

}  // namespace

Aig parse_aiger(std::string_view bytes) {
  Reader reader(bytes);
  const auto header = parse_header(reader.line());
  AigBuilder builder;
  Resolver resolver(builder, header.max_var);

  if (header.binary) {
    for (std::uint32_t i = 0; i < header.inputs; ++i) resolver.define_input(2 * (i + 1));
  } else {
    for (std::uint32_t i = 0; i < header.inputs; ++i) resolver.define_input(single_number(reader.line()));
  }
  std::vector<std::uint32_t> outputs;
  for (std::uint32_t i = 0; i < header.outputs; ++i) outputs.push_back(single_number(reader.line()));

  if (header.binary) {
    for (std::uint32_t i = 0; i < header.ands; ++i) {
      const std::uint32_t lhs = 2 * (header.inputs + i + 1);
      const auto delta0 = reader.varint();
      const auto delta1 = reader.varint();
      if (delta0 > lhs || delta1 > lhs - delta0) throw AigerError("invalid binary and2 delta");
      const std::uint32_t rhs0 = lhs - delta0;
      resolver.define_and(lhs, rhs0, rhs0 - delta1);
    }
  } else {
    for (std::uint32_t i = 0; i < header.ands; ++i) {
      const auto fields = parse_numbers(reader.line());
      if (fields.size() != 3) throw AigerError("and2 line must have three literals");
      resolver.define_and(fields[0], fields[1], fields[2]);
    }
  }
  resolver.resolve_all();
  for (auto raw : outputs) builder.add_output(resolver.lit(raw));

  auto aig = std::move(builder).build();
  aig.set_name(read_name(reader));
  return aig;
}

std::string write_aiger(const Aig& aig) {
  std::string out = header_line("aag", aig);
  for (std::size_t i = 0; i < aig.num_inputs(); ++i) out += std::to_string(aig.input(i).raw()) + '\n';
  for (Lit o : aig.outputs()) out += std::to_string(o.raw()) + '\n';
  for (auto n = static_cast<std::uint32_t>(aig.num_inputs() + 1); n < aig.num_nodes(); ++n) {
    out += std::to_string(Lit::make(n).raw()) + ' ' + std::to_string(aig.fanin0(n).raw()) + ' ' +
           std::to_string(aig.fanin1(n).raw()) + '\n';
  }
  if (!aig.name().empty()) out += "c\n" + aig.name() + '\n';
  return out;
}

std::string write_aiger_binary(const Aig& aig) {
  std::string out = header_line("aig", aig);
  for (Lit o : aig.outputs()) out += std::to_string(o.raw()) + '\n';
  for (auto n = static_cast<std::uint32_t>(aig.num_inputs() + 1); n < aig.num_nodes(); ++n) {
    const auto lhs = Lit::make(n).raw();
    const auto hi = aig.fanin1(n).raw();
    const auto lo = aig.fanin0(n).raw();
    encode_varint(out, lhs - hi);
    encode_varint(out, hi - lo);
  }
  if (!aig.name().empty()) out += "c\n" + aig.name() + '\n';
  return out;
}

Aig read_aiger_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AigerError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  auto aig = parse_aiger(buffer.str());
  if (aig.name().empty()) aig.set_name(path.stem().string());
  return aig;
}

void write_aiger_file(const Aig& aig, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw AigerError("cannot write " + path.string());
  out << (path.extension() == ".aig" ? write_aiger_binary(aig) : write_aiger(aig));
}

}  // namespace lsopt
