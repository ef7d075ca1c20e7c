#include "bigatomic/lincheck/history.hpp"

#include <sstream>

namespace bigatomic::lincheck {

const char* to_string(op_kind k) noexcept {
  switch (k) {
    case op_kind::load: return "load";
    case op_kind::store: return "store";
    case op_kind::cas: return "cas";
    case op_kind::find: return "find";
    case op_kind::insert: return "insert";
    case op_kind::erase: return "erase";
  }
  return "?";
}

const char* to_string(verdict v) noexcept {
  switch (v) {
    case verdict::linearizable: return "linearizable";
    case verdict::not_linearizable: return "not linearizable";
    case verdict::refused: return "refused (history too large)";
  }
  return "?";
}

std::string describe(const operation& op) {
  std::ostringstream os;
  os << "t" << op.thread << " [" << op.invoke << "," << op.response << "] " << to_string(op.kind);
  switch (op.kind) {
    case op_kind::load: os << "(c" << op.target << ") -> " << op.ret; break;
    case op_kind::store: os << "(c" << op.target << ", " << op.arg0 << ")"; break;
    case op_kind::cas:
      os << "(c" << op.target << ", " << op.arg0 << ", " << op.arg1 << ") -> " << op.ok;
      break;
    case op_kind::find:
      os << "(" << op.arg0 << ") -> ";
      if (op.ok) os << op.ret; else os << "absent";
      break;
    case op_kind::insert: os << "(" << op.arg0 << ", " << op.arg1 << ") -> " << op.ok; break;
    case op_kind::erase: os << "(" << op.arg0 << ") -> " << op.ok; break;
  }
  return os.str();
}

std::string describe(const std::vector<operation>& history) {
  std::string out;
  for (const auto& op : history) out += describe(op) + "\n";
  return out;
}

bool register_model::apply(state& s, const operation& op) {
  std::uint64_t& cell = s.at(op.target);
  switch (op.kind) {
    case op_kind::load: return op.ret == cell;
    case op_kind::store: cell = op.arg0; return true;
    case op_kind::cas:
      if (op.ok != (cell == op.arg0)) return false;
      if (op.ok) cell = op.arg1;
      return true;
    default: return false;
  }
}

bool map_model::apply(state& s, const operation& op) {
  std::size_t i = 0;
  while (i < s.size() && s[i] < op.arg0) i += 2;
  const bool present = i < s.size() && s[i] == op.arg0;
  switch (op.kind) {
    case op_kind::find:
      if (op.ok != present) return false;
      return !present || s[i + 1] == op.ret;
    case op_kind::insert:
      if (op.ok == present) return false;
      if (op.ok) s.insert(s.begin() + static_cast<std::ptrdiff_t>(i), {op.arg0, op.arg1});
      return true;
    case op_kind::erase:
      if (op.ok != present) return false;
      if (op.ok) s.erase(s.begin() + static_cast<std::ptrdiff_t>(i), s.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      return true;
    default: return false;
  }
}

}  // namespace bigatomic::lincheck
