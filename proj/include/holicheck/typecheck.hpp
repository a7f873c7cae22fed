#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "holicheck/name.hpp"
#include "holicheck/surface.hpp"
#include "holicheck/term.hpp"

namespace holi {

enum class Origin { Library, Client };

struct TypedDecl {
  surface::DeclKind kind = surface::DeclKind::Private;
  Name name;
  // Public/Private: the method's lambda. RefFun: a lambda or a method name.
  TermPtr fn;
  std::int64_t init = 0;
  Origin origin = Origin::Library;
};

/// A typechecked library (or client, when `main` is set) over resolved Names.
struct TypedLibrary {
  std::vector<TypedDecl> decls;
  TermPtr main;
  /// Continues after every name allocated while checking.
  NameSupply supply;
  /// Declared methods and references by spelling.
  std::map<std::string, Name, std::less<>> globals;
  surface::SourceLibrary source;

  bool is_client() const { return main != nullptr; }
  const Name* global(std::string_view spelling) const;
};

/// Checks a parsed library against the typing rules and resolves every
/// identifier. Sugar is expanded first. Declared names are allocated from a
/// supply started at `seed`, in declaration order.
TypedLibrary typecheck(const surface::SourceLibrary& lib, std::uint32_t seed = 0);

/// Convenience: parse_any + typecheck.
TypedLibrary load(std::string_view text);

}  // namespace holi
