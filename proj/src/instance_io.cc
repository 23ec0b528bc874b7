/**
 * instance_io.cc
 */

#include "percplan/instance_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace percplan {

namespace {

constexpr int kMaxGridSide = 64;

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::string_view strip_comment(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) {
    line = line.substr(0, hash);
  }
  return trim(line);
}

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

// Non-empty lines with comments removed, numbered from 1.
std::vector<Line> logical_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  for (std::string_view raw : split_lines(text)) {
    ++number;
    auto tokens = tokenize(strip_comment(raw));
    if (!tokens.empty()) out.push_back({number, std::move(tokens)});
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, std::string("expected ") + what + ", got '" +
                               std::string(text) + "'");
  }
  return value;
}

Orientation parse_orient_token(std::string_view text, std::size_t line) {
  auto orient = parse_orientation(text);
  if (!orient) {
    throw ParseError(line, "unknown orientation '" + std::string(text) + "'");
  }
  return *orient;
}

void expect_arity(const Line& line, std::size_t n, const char* usage) {
  if (line.tokens.size() != n) {
    throw ParseError(line.number, std::string("expected: ") + usage);
  }
}

void expect_keyword(const Line& line, std::size_t index, std::string_view word,
                    const char* usage) {
  if (line.tokens[index] != word) {
    throw ParseError(line.number, std::string("expected: ") + usage);
  }
}

Cell parse_cell_token(std::string_view text, const Grid& grid,
                      std::size_t line) {
  auto cell = parse_cell_name(text);
  if (!cell) throw ParseError(line, "malformed cell '" + std::string(text) + "'");
  if (!grid.contains(*cell)) {
    throw ParseError(line, cell->name() + " is outside the grid");
  }
  return *cell;
}

bool valid_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

// Parses `kind(args)` where args are comma separated, whitespace ignored.
std::optional<std::pair<std::string, std::vector<std::string>>> parse_call(
    std::string_view text) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos ||
      close < open) {
    return std::nullopt;
  }
  std::pair<std::string, std::vector<std::string>> out;
  out.first = std::string(trim(text.substr(0, open)));
  std::string_view args = text.substr(open + 1, close - open - 1);
  while (true) {
    const auto comma = args.find(',');
    out.second.emplace_back(trim(args.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    args.remove_prefix(comma + 1);
  }
  return out;
}

std::string join_rest(const Line& line, std::size_t from) {
  std::string out;
  for (std::size_t i = from; i < line.tokens.size(); ++i) out += line.tokens[i];
  return out;
}

FluentLiteral parse_goal(const Line& line, const Grid& grid) {
  if (line.tokens.size() < 2) {
    throw ParseError(line.number, "expected: goal <literal>");
  }
  const std::string text = join_rest(line, 1);
  const auto eq = text.find('=');
  const auto call = parse_call(eq == std::string::npos ? text : text.substr(0, eq));
  if (!call) throw ParseError(line.number, "malformed goal '" + text + "'");
  const auto& [kind, args] = *call;

  const auto entity = [&](const std::string& name) -> Entity {
    if (name.starts_with("loc_")) return parse_cell_token(name, grid, line.number);
    if (!valid_name(name)) {
      throw ParseError(line.number, "malformed name '" + name + "'");
    }
    return ObjectId{name};
  };
  const auto object = [&](const std::string& name) {
    if (!valid_name(name) || name.starts_with("loc_")) {
      throw ParseError(line.number, "expected an object name, got '" + name + "'");
    }
    return ObjectId{name};
  };

  if ((kind == "at" || kind == "ori") && args.size() == 1 &&
      eq != std::string::npos) {
    const std::string rhs(trim(std::string_view(text).substr(eq + 1)));
    if (kind == "at") return FluentLiteral::At(object(args[0]), entity(rhs));
    return FluentLiteral::Ori(object(args[0]), parse_orient_token(rhs, line.number));
  }
  if (kind == "below" && args.size() == 2 && eq == std::string::npos) {
    return FluentLiteral::Below(entity(args[0]), object(args[1]));
  }
  throw ParseError(line.number, "malformed goal '" + text + "'");
}

}  // namespace

// -----------------------------------------------------------------------------
// Instances
// -----------------------------------------------------------------------------

namespace {

ParsedInstance parse_instance_impl(std::string_view text,
                                   const ShapeCatalog* catalog) {
  const std::vector<Line> lines = logical_lines(text);
  if (lines.empty()) throw ParseError(1, "missing 'grid' line");
  if (lines.front().tokens[0] != "grid") {
    throw ParseError(lines.front().number, "the first line must be 'grid'");
  }

  ParsedInstance out;
  std::set<std::string> labels;
  std::set<std::string> targets;
  bool seen_camera = false;
  bool seen_maxstep = false;
  std::vector<std::pair<std::size_t, FluentLiteral>> goals;
  std::size_t last_target_line = 0;
  out.horizon.maxstep = kDefaultMaxstep;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Line& line = lines[i];
    const std::string_view head = line.tokens[0];

    if (head == "grid") {
      if (i != 0) throw ParseError(line.number, "duplicate 'grid' line");
      expect_arity(line, 3, "grid <width> <depth>");
      out.scene.grid.width = parse_number<int>(line.tokens[1], line.number, "width");
      out.scene.grid.depth = parse_number<int>(line.tokens[2], line.number, "depth");
      for (int side : {out.scene.grid.width, out.scene.grid.depth}) {
        if (side < 1 || side > kMaxGridSide) {
          throw ParseError(line.number, "grid sides must be within 1.." +
                                            std::to_string(kMaxGridSide));
        }
      }
    } else if (head == "camera") {
      expect_arity(line, 2, "camera <preset>");
      if (seen_camera) throw ParseError(line.number, "duplicate 'camera' line");
      seen_camera = true;
      if (line.tokens[1] != "depth" && line.tokens[1] != "none") {
        throw ParseError(line.number,
                         "unknown camera preset '" + std::string(line.tokens[1]) + "'");
      }
      out.scene.camera.preset = std::string(line.tokens[1]);
    } else if (head == "infront") {
      expect_arity(line, 3, "infront <cell> <cell>");
      const Cell front = parse_cell_token(line.tokens[1], out.scene.grid, line.number);
      const Cell behind = parse_cell_token(line.tokens[2], out.scene.grid, line.number);
      if (front == behind) {
        throw ParseError(line.number, "a cell cannot be in front of itself");
      }
      out.scene.camera.infront.emplace_back(front, behind);
    } else if (head == "object") {
      constexpr const char* kUsage =
          "object <label> cell <x> <y> orient <orient> shape <shape> at <fx> <fy>";
      expect_arity(line, 12, kUsage);
      expect_keyword(line, 2, "cell", kUsage);
      expect_keyword(line, 5, "orient", kUsage);
      expect_keyword(line, 7, "shape", kUsage);
      expect_keyword(line, 9, "at", kUsage);
      PhysicalObject obj;
      obj.label = std::string(line.tokens[1]);
      if (!valid_name(obj.label)) {
        throw ParseError(line.number, "malformed label '" + obj.label + "'");
      }
      if (!labels.insert(obj.label).second) {
        throw ParseError(line.number, "duplicate object '" + obj.label + "'");
      }
      obj.cell.x = parse_number<int>(line.tokens[3], line.number, "x");
      obj.cell.y = parse_number<int>(line.tokens[4], line.number, "y");
      if (!out.scene.grid.contains(obj.cell)) {
        throw ParseError(line.number, obj.cell.name() + " is outside the grid");
      }
      obj.orient = parse_orient_token(line.tokens[6], line.number);
      obj.shape = ShapeId{std::string(line.tokens[8])};
      if (catalog != nullptr && !catalog->declares(obj.shape)) {
        throw ParseError(line.number, "shape '" + obj.shape.name +
                                          "' is not in the catalog");
      }
      obj.fx = parse_number<double>(line.tokens[10], line.number, "fx");
      obj.fy = parse_number<double>(line.tokens[11], line.number, "fy");
      out.scene.objects.push_back(std::move(obj));
    } else if (head == "target") {
      constexpr const char* kUsage = "target <objN> near <fx> <fy>";
      expect_arity(line, 5, kUsage);
      expect_keyword(line, 2, "near", kUsage);
      const std::string expected = "obj" + std::to_string(out.task.targets.size() + 1);
      if (line.tokens[1] != expected) {
        throw ParseError(line.number, "targets must be named obj1..objN in order; expected '" +
                                          expected + "'");
      }
      TaskTarget target{ObjectId{expected},
                        parse_number<double>(line.tokens[3], line.number, "fx"),
                        parse_number<double>(line.tokens[4], line.number, "fy")};
      targets.insert(expected);
      out.task.targets.push_back(std::move(target));
      last_target_line = line.number;
    } else if (head == "goal") {
      goals.emplace_back(line.number, parse_goal(line, out.scene.grid));
    } else if (head == "maxstep") {
      expect_arity(line, 2, "maxstep <n>");
      if (seen_maxstep) throw ParseError(line.number, "duplicate 'maxstep' line");
      seen_maxstep = true;
      const int n = parse_number<int>(line.tokens[1], line.number, "maxstep");
      if (n < 0 || n > Horizon::kCap) {
        throw ParseError(line.number, "maxstep must be within 0.." +
                                          std::to_string(Horizon::kCap));
      }
      out.horizon.maxstep = n;
    } else {
      throw ParseError(line.number, "unknown directive '" + std::string(head) + "'");
    }
  }

  if (out.task.targets.size() > out.scene.objects.size()) {
    throw ParseError(last_target_line, "more targets than scene objects");
  }
  for (auto& [number, literal] : goals) {
    if (!targets.contains(literal.obj.name)) {
      throw ParseError(number, "goal names '" + literal.obj.name +
                                   "', which is not a target");
    }
    if (const auto* obj = std::get_if<ObjectId>(&literal.entity);
        obj != nullptr && literal.kind != FluentLiteral::Kind::kOri &&
        !targets.contains(obj->name)) {
      throw ParseError(number, "goal names '" + obj->name +
                                   "', which is not a target");
    }
    out.task.goal.literals.push_back(std::move(literal));
  }
  return out;
}

}  // namespace

ParsedInstance parse_instance(std::string_view text) {
  return parse_instance_impl(text, nullptr);
}

// -----------------------------------------------------------------------------
// Catalogs
// -----------------------------------------------------------------------------

ShapeCatalog parse_catalog(std::string_view text) {
  ShapeCatalog catalog;
  for (const Line& line : logical_lines(text)) {
    const std::string_view head = line.tokens[0];
    try {
      if (head == "shape") {
        expect_arity(line, 2, "shape <name>");
        if (!valid_name(line.tokens[1])) {
          throw ParseError(line.number, "malformed shape name");
        }
        catalog.add_shape(ShapeId{std::string(line.tokens[1])});
      } else if (head == "unstable") {
        expect_arity(line, 5, "unstable <shape|*> <orient|*> <shape|*> <orient|*>");
        const auto shape = [&](std::string_view t) -> std::optional<ShapeId> {
          if (t == "*") return std::nullopt;
          return ShapeId{std::string(t)};
        };
        const auto orient = [&](std::string_view t) -> std::optional<Orientation> {
          if (t == "*") return std::nullopt;
          return parse_orient_token(t, line.number);
        };
        catalog.add_unstable({shape(line.tokens[1]), orient(line.tokens[2]),
                              shape(line.tokens[3]), orient(line.tokens[4])});
      } else if (head == "blocker") {
        expect_arity(line, 3, "blocker <shape> <orient>");
        catalog.add_blocker({ShapeId{std::string(line.tokens[1])},
                             parse_orient_token(line.tokens[2], line.number)});
      } else {
        throw ParseError(line.number, "unknown directive '" + std::string(head) + "'");
      }
    } catch (const DomainError& e) {
      throw ParseError(line.number, e.what());
    }
  }
  return catalog;
}

// -----------------------------------------------------------------------------
// Plans
// -----------------------------------------------------------------------------

std::string render_plan(const Plan& plan) {
  std::string out;
  for (std::size_t t = 0; t < plan.steps.size(); ++t) {
    if (t > 0) out += '\n';
    out += std::to_string(t);
    out += ": ";
    out += to_string(plan.steps[t]);
    out += '.';
  }
  return out;
}

Plan parse_plan(std::string_view text) {
  Plan plan;
  std::size_t number = 0;
  for (std::string_view raw : split_lines(text)) {
    ++number;
    std::string_view line = strip_comment(raw);
    if (line.empty()) continue;

    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(number, "expected '<T>: move(<obj>,<dest>,<orient>).'");
    }
    const auto step = parse_number<std::size_t>(trim(line.substr(0, colon)), number,
                                                "step index");
    if (step != plan.steps.size()) {
      throw ParseError(number, "expected step " + std::to_string(plan.steps.size()) +
                                   ", got " + std::to_string(step));
    }
    std::string_view body = trim(line.substr(colon + 1));
    if (!body.ends_with('.')) throw ParseError(number, "missing final '.'");
    body.remove_suffix(1);
    const auto call = parse_call(body);
    if (!call || call->first != "move" || call->second.size() != 3 ||
        !trim(body).ends_with(')')) {
      throw ParseError(number, "malformed move '" + std::string(body) + "'");
    }
    const auto& args = call->second;
    if (!valid_name(args[0]) || args[0].starts_with("loc_")) {
      throw ParseError(number, "malformed object '" + args[0] + "'");
    }
    if (!valid_name(args[1]) ||
        (args[1].starts_with("loc_") && !parse_cell_name(args[1]))) {
      throw ParseError(number, "malformed destination '" + args[1] + "'");
    }
    plan.steps.push_back({ObjectId{args[0]}, parse_entity(args[1]),
                          parse_orient_token(args[2], number)});
  }
  return plan;
}

// -----------------------------------------------------------------------------
// Loading
// -----------------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

LoadedInstance make_instance(std::string id, std::string_view instance_text,
                             std::string_view catalog_text) {
  LoadedInstance loaded;
  loaded.id = std::move(id);
  loaded.catalog = parse_catalog(catalog_text);
  ParsedInstance parsed = parse_instance_impl(instance_text, &loaded.catalog);
  loaded.scene = std::move(parsed.scene);
  loaded.task = std::move(parsed.task);
  loaded.horizon = parsed.horizon;
  loaded.config.grid = loaded.scene.grid;
  return loaded;
}

LoadedInstance load_instance(const std::filesystem::path& instance_path,
                             const std::filesystem::path& catalog_path) {
  return make_instance(instance_path.stem().string(),
                       read_text_file(instance_path),
                       read_text_file(catalog_path));
}

}  // namespace percplan
