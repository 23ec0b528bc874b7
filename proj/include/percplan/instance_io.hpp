/**
 * instance_io.hpp
 *
 * Line-oriented text formats. `#` starts a comment everywhere.
 *
 * Instance files:
 *
 *   grid <width> <depth>
 *   camera <depth|none>
 *   infront <cell> <cell>
 *   object <label> cell <x> <y> orient <vert|hox|hoy|horiz_x|horiz_y>
 *          shape <shape> at <fx> <fy>
 *   target <objN> near <fx> <fy>
 *   goal at(<obj>)=<entity> | goal ori(<obj>)=<orient>
 *        | goal below(<entity>,<obj>)
 *   maxstep <n>
 *
 * Catalog files:
 *
 *   shape <name>
 *   unstable <top_shape|*> <top_orient|*> <bottom_shape|*> <bottom_orient|*>
 *   blocker <shape> <orient>
 *
 * Plans: one `<T>: move(<obj>,<dest>,<orient>).` line per step.
 */

#ifndef PERCPLAN_INSTANCE_IO_HPP
#define PERCPLAN_INSTANCE_IO_HPP

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "percplan/geometry.hpp"
#include "percplan/perception.hpp"
#include "percplan/plan_search.hpp"
#include "percplan/strategies.hpp"

namespace percplan {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr int kDefaultMaxstep = 3;

struct ParsedInstance {
  SceneTruth scene;
  TaskSpec task;
  Horizon horizon;
};

/// Throws ParseError with the offending line.
ParsedInstance parse_instance(std::string_view text);

ShapeCatalog parse_catalog(std::string_view text);

/// Empty plan renders as "".
std::string render_plan(const Plan& plan);

/// Accepts cell and object destinations and orientation aliases.
Plan parse_plan(std::string_view text);

/// Reads both files; the instance id is the instance file's stem. Shapes used
/// by the scene must be declared in the catalog.
LoadedInstance load_instance(const std::filesystem::path& instance_path,
                             const std::filesystem::path& catalog_path);

/// Same, from in-memory text.
LoadedInstance make_instance(std::string id, std::string_view instance_text,
                             std::string_view catalog_text);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace percplan

#endif  // PERCPLAN_INSTANCE_IO_HPP
