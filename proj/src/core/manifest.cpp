// Copyright 2026 The Cloud Broker Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cloudbroker/manifest.hpp"

#include <algorithm>
#include <array>
#include <regex>
#include <sstream>

#include "json_util.hpp"

namespace cloudbroker {

namespace {

constexpr std::array<std::pair<ComponentKind, std::string_view>, 5> kKindNames{{
    {ComponentKind::DataSource, "dataSource"},
    {ComponentKind::DomainClasses, "domainClasses"},
    {ComponentKind::Controllers, "controllers"},
    {ComponentKind::Views, "views"},
    {ComponentKind::Services, "services"},
}};

constexpr std::array<std::pair<CloudType, std::string_view>, 3> kCloudTypeNames{{
    {CloudType::Iaas, "iaas"},
    {CloudType::Paas, "paas"},
    {CloudType::Saas, "saas"},
}};

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_identifier(std::string_view s) {
  return !s.empty() && is_ident_start(s.front()) &&
         std::all_of(s.begin() + 1, s.end(), is_ident_char);
}

}  // namespace

std::string_view to_string(ComponentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) {
      return name;
    }
  }
  return "?";
}

std::optional<ComponentKind> component_kind_from_string(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) {
      return k;
    }
  }
  return std::nullopt;
}

std::string_view to_string(CloudType type) {
  for (const auto& [t, name] : kCloudTypeNames) {
    if (t == type) {
      return name;
    }
  }
  return "?";
}

std::optional<CloudType> cloud_type_from_string(std::string_view text) {
  for (const auto& [t, name] : kCloudTypeNames) {
    if (name == text) {
      return t;
    }
  }
  return std::nullopt;
}

std::string_view to_string(Lifecycle lifecycle) {
  return lifecycle == Lifecycle::Active ? "active" : "passive";
}

std::string ComponentId::key() const {
  std::string out{to_string(kind)};
  out += '/';
  out += name;
  return out;
}

ComponentId ComponentId::parse(std::string_view key) {
  auto slash = key.find('/');
  if (slash == std::string_view::npos) {
    throw BrokerError(ErrorCode::UnknownComponent, std::string(key));
  }
  auto kind = component_kind_from_string(key.substr(0, slash));
  if (!kind) {
    throw BrokerError(ErrorCode::UnknownComponent, std::string(key));
  }
  return {*kind, std::string(key.substr(slash + 1))};
}

const Component* ApplicationModel::find(const ComponentId& id) const {
  for (const auto& c : components) {
    if (c.kind == id.kind && c.name == id.name) {
      return &c;
    }
  }
  return nullptr;
}

void ApplicationModel::validate() const {
  std::set<ComponentId> seen;
  for (const auto& c : components) {
    if (c.name.empty()) {
      detail::invalid("components.name", "component name must not be empty");
    }
    if (!seen.insert(c.id()).second) {
      detail::invalid("components.name", "duplicate component " + c.id().key());
    }
    if (c.requiredTech.empty()) {
      detail::invalid("components.requiredTech", c.id().key() + " needs at least one tech tag");
    }
  }
}

ApplicationModel application_from_json(const nlohmann::json& doc) {
  ApplicationModel app;
  app.appId = detail::get_string(doc, "appId");
  const auto& comps = detail::require(doc, "components");
  if (!comps.is_array()) {
    detail::invalid("components", "expected an array");
  }
  for (const auto& entry : comps) {
    Component c;
    c.name = detail::get_string(entry, "name");
    auto kindText = detail::get_string(entry, "kind");
    auto kind = component_kind_from_string(kindText);
    if (!kind) {
      detail::invalid("components.kind", "unknown kind '" + kindText + "'");
    }
    c.kind = *kind;
    c.requiredTech = detail::get_string_set(entry, "requiredTech");
    if (auto it = entry.find("environment"); it != entry.end() && !it->is_null()) {
      c.environment = detail::get_string(entry, "environment");
    }
    app.components.push_back(std::move(c));
  }
  app.validate();
  return app;
}

nlohmann::json to_json(const ApplicationModel& app) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : app.components) {
    nlohmann::json e{{"name", c.name},
                     {"kind", std::string(to_string(c.kind))},
                     {"requiredTech", detail::string_array(c.requiredTech)}};
    if (c.environment) {
      e["environment"] = *c.environment;
    }
    comps.push_back(std::move(e));
  }
  return {{"appId", app.appId}, {"components", std::move(comps)}};
}

OptionCategory category_of(const DeploymentOption& option) {
  switch (option.index()) {
    case 0: return OptionCategory::Economy;
    case 1: return OptionCategory::BestEffort;
    default: return OptionCategory::PrivateCloud;
  }
}

std::string_view to_string(OptionCategory category) {
  switch (category) {
    case OptionCategory::Economy: return "economy";
    case OptionCategory::BestEffort: return "bestEffort";
    case OptionCategory::PrivateCloud: return "privateCloud";
  }
  return "?";
}

std::optional<OptionCategory> option_category_from_string(std::string_view text) {
  if (text == "economy") return OptionCategory::Economy;
  if (text == "bestEffort") return OptionCategory::BestEffort;
  if (text == "privateCloud") return OptionCategory::PrivateCloud;
  return std::nullopt;
}

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

}  // namespace

std::string describe(const DeploymentOption& option) {
  if (const auto* pc = std::get_if<PrivateCloud>(&option)) {
    return "privateCloud(" + quote(pc->endpoint) + ", " + std::string(to_string(pc->cloudType)) +
           ", " + quote(pc->providerId) + ")";
  }
  return std::string(to_string(category_of(option)));
}

bool is_valid_absolute_url(std::string_view text) {
  // scheme://host[:port][/path][?query][#fragment]
  static const std::regex kUrl(
      R"(^[A-Za-z][A-Za-z0-9+.\-]*://([A-Za-z0-9\-._~%!$&'()*+,;=]+@)?()"
      R"(\[[0-9A-Fa-f:.]+\]|[A-Za-z0-9\-._~%]+)(:[0-9]{1,5})?([/?#][^\s]*)?$)");
  return std::regex_match(text.begin(), text.end(), kUrl);
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { Ident, String, LBrace, RBrace, LBracket, RBracket, LParen, RParen, Comma, Dot,
                 Equals, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        t.type = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (is_ident_start(c)) {
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) {
          t.text += src_[pos_];
          advance();
        }
        t.type = Tok::Ident;
      } else if (c == '"') {
        t.type = Tok::String;
        t.text = read_string(t.line, t.column);
      } else {
        switch (c) {
          case '{': t.type = Tok::LBrace; break;
          case '}': t.type = Tok::RBrace; break;
          case '[': t.type = Tok::LBracket; break;
          case ']': t.type = Tok::RBracket; break;
          case '(': t.type = Tok::LParen; break;
          case ')': t.type = Tok::RParen; break;
          case ',': t.type = Tok::Comma; break;
          case '.': t.type = Tok::Dot; break;
          case '=': t.type = Tok::Equals; break;
          default:
            throw SyntaxError(line_, col_, "a token (unexpected character '" + std::string(1, c) +
                                               "')");
        }
        t.text = std::string(1, c);
        advance();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') {
          advance();
        }
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        return;
      }
    }
  }

  std::string read_string(int line, int column) {
    std::string out;
    advance();  // opening quote
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '"') {
        advance();
        return out;
      }
      if (c == '\n') {
        break;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) {
          break;
        }
        char e = src_[pos_];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default:
            throw SyntaxError(line_, col_, "a valid escape sequence");
        }
        advance();
        continue;
      }
      out += c;
      advance();
    }
    throw SyntaxError(line, column, "a closing '\"'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  DeploymentManifest parse() {
    DeploymentManifest m;
    expect_ident("broker");
    expect(Tok::LBrace, "'{'");
    if (!(peek().type == Tok::Ident && peek().text == "governance")) {
      throw BrokerError(ErrorCode::MissingLifecycle, "",
                        "MissingLifecycle: manifest must start with governance.lifecycle");
    }
    m.lifecycle = parse_lifecycle();
    while (peek().type != Tok::RBrace) {
      const Token& t = peek();
      if (t.type != Tok::Ident) {
        fail(t, "a component kind or '}'");
      }
      auto kind = component_kind_from_string(t.text);
      if (!kind) {
        fail(t, "a component kind (dataSource, domainClasses, controllers, views, services)");
      }
      next();
      parse_kind_block(*kind, m.bindings);
    }
    next();
    if (peek().type != Tok::End) {
      fail(peek(), "end of input");
    }
    check_duplicates(m.bindings);
    return m;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const Token& t, const std::string& expected) const {
    throw SyntaxError(t.line, t.column, expected);
  }

  const Token& expect(Tok type, const char* what) {
    if (peek().type != type) {
      fail(peek(), what);
    }
    return next();
  }

  void expect_ident(std::string_view word) {
    if (peek().type != Tok::Ident || peek().text != word) {
      fail(peek(), "'" + std::string(word) + "'");
    }
    next();
  }

  Lifecycle parse_lifecycle() {
    expect_ident("governance");
    expect(Tok::Dot, "'.'");
    expect_ident("lifecycle");
    expect(Tok::Equals, "'='");
    const Token& t = peek();
    if (t.type == Tok::Ident && t.text == "active") {
      next();
      return Lifecycle::Active;
    }
    if (t.type == Tok::Ident && t.text == "passive") {
      next();
      return Lifecycle::Passive;
    }
    fail(t, "'active' or 'passive'");
  }

  void parse_kind_block(ComponentKind kind, std::vector<ComponentBinding>& out) {
    expect(Tok::LBrace, "'{'");
    if (peek().type == Tok::RBrace) {
      fail(peek(), "at least one binding");
    }
    while (peek().type != Tok::RBrace) {
      ComponentBinding b;
      b.sourceLine = peek().line;
      b.selector = parse_selector(kind);
      b.option = parse_option();
      out.push_back(std::move(b));
    }
    next();
  }

  ComponentSelector parse_selector(ComponentKind kind) {
    ComponentSelector sel;
    sel.kind = kind;
    const Token& t = peek();
    if (t.type == Tok::Ident && t.text == "all") {
      next();
      return sel;
    }
    if (t.type == Tok::LBracket) {
      next();
      for (;;) {
        const Token& name = expect(Tok::String, "a quoted component name");
        if (std::find(sel.names.begin(), sel.names.end(), name.text) != sel.names.end()) {
          fail(name, "distinct component names");
        }
        sel.names.push_back(name.text);
        if (peek().type == Tok::Comma) {
          next();
          continue;
        }
        expect(Tok::RBracket, "',' or ']'");
        return sel;
      }
    }
    if (t.type == Tok::Ident && t.text == "environments" && kind == ComponentKind::DataSource) {
      next();
      expect(Tok::LBracket, "'['");
      sel.environment = expect(Tok::String, "a quoted environment name").text;
      expect(Tok::RBracket, "']'");
      expect(Tok::Dot, "'.'");
      const Token& name = expect(Tok::Ident, "a data source name");
      if (name.text != "all") {
        sel.names.push_back(name.text);
      }
      return sel;
    }
    fail(t, kind == ComponentKind::DataSource ? "'all', a name list or environments[...]"
                                              : "'all' or a name list");
  }

  DeploymentOption parse_option() {
    const Token& t = peek();
    if (t.type != Tok::Ident) {
      fail(t, "economy, bestEffort or privateCloud");
    }
    if (t.text == "economy") {
      next();
      return Economy{};
    }
    if (t.text == "bestEffort") {
      next();
      return BestEffort{};
    }
    if (t.text == "privateCloud") {
      int line = t.line;
      next();
      return parse_private_cloud(line);
    }
    fail(t, "economy, bestEffort or privateCloud");
  }

  // The argument tuple is collected loosely first so that an arity or type
  // mistake reports InvalidOptionArgs rather than a bare syntax error.
  PrivateCloud parse_private_cloud(int line) {
    expect(Tok::LParen, "'('");
    std::vector<Token> args;
    bool expectArg = true;
    for (;;) {
      const Token& t = peek();
      if (t.type == Tok::RParen) {
        next();
        break;
      }
      if (t.type == Tok::End || t.type == Tok::LBrace || t.type == Tok::RBrace) {
        fail(t, "')'");
      }
      if (t.type == Tok::Comma) {
        if (expectArg) {
          bad_args(line, "empty argument");
        }
        expectArg = true;
        next();
        continue;
      }
      if (!expectArg) {
        bad_args(line, "arguments must be separated by ','");
      }
      args.push_back(t);
      expectArg = false;
      next();
    }
    if (args.size() != 3 || (expectArg && !args.empty())) {
      bad_args(line, "privateCloud takes (endpoint, cloudType, providerId)");
    }
    if (args[0].type != Tok::String || !is_valid_absolute_url(args[0].text)) {
      bad_args(line, "endpoint must be a quoted absolute URL");
    }
    auto type = args[1].type == Tok::Ident ? cloud_type_from_string(args[1].text) : std::nullopt;
    if (!type) {
      bad_args(line, "cloudType must be one of iaas, paas, saas");
    }
    if (args[2].type != Tok::String || args[2].text.empty()) {
      bad_args(line, "providerId must be a non-empty quoted string");
    }
    return PrivateCloud{args[0].text, *type, args[2].text};
  }

  [[noreturn]] static void bad_args(int line, const std::string& why) {
    throw ManifestLineError(ErrorCode::InvalidOptionArgs, line, why);
  }

  static void check_duplicates(const std::vector<ComponentBinding>& bindings) {
    using Key = std::tuple<ComponentKind, std::vector<std::string>, std::optional<std::string>>;
    std::set<Key> seen;
    for (const auto& b : bindings) {
      auto names = b.selector.names;
      std::sort(names.begin(), names.end());
      if (!seen.insert({b.selector.kind, std::move(names), b.selector.environment}).second) {
        throw ManifestLineError(ErrorCode::DuplicateSelector, b.sourceLine,
                                "selector repeats an earlier binding");
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

DeploymentManifest parse_manifest(std::string_view text) {
  return Parser(Lexer(text).tokenize()).parse();
}

void validate_manifest(const DeploymentManifest& manifest) {
  using Key = std::tuple<ComponentKind, std::vector<std::string>, std::optional<std::string>>;
  std::set<Key> seen;
  for (const auto& b : manifest.bindings) {
    const auto& sel = b.selector;
    std::set<std::string> unique(sel.names.begin(), sel.names.end());
    if (unique.size() != sel.names.size()) {
      detail::invalid("selector.names", "duplicate names in selector");
    }
    if (sel.environment) {
      if (sel.kind != ComponentKind::DataSource) {
        detail::invalid("selector.environment", "environment qualifiers apply to dataSource only");
      }
      if (sel.names.size() > 1 ||
          (sel.names.size() == 1 && (!is_identifier(sel.names[0]) || sel.names[0] == "all"))) {
        detail::invalid("selector.names",
                        "environment selectors name at most one identifier data source");
      }
    }
    if (const auto* pc = std::get_if<PrivateCloud>(&b.option)) {
      if (!is_valid_absolute_url(pc->endpoint)) {
        detail::invalid("privateCloud.endpoint", "not an absolute URL");
      }
      if (pc->providerId.empty()) {
        detail::invalid("privateCloud.providerId", "must not be empty");
      }
    }
    std::vector<std::string> names = sel.names;
    std::sort(names.begin(), names.end());
    if (!seen.insert({sel.kind, std::move(names), sel.environment}).second) {
      detail::invalid("bindings", "duplicate selector");
    }
  }
}

std::string serialize_manifest(const DeploymentManifest& manifest) {
  std::ostringstream out;
  out << "broker {\n";
  out << "  governance.lifecycle = " << to_string(manifest.lifecycle) << "\n";
  std::optional<ComponentKind> open;
  for (const auto& b : manifest.bindings) {
    if (open != b.selector.kind) {
      if (open) {
        out << "  }\n";
      }
      out << "  " << to_string(b.selector.kind) << " {\n";
      open = b.selector.kind;
    }
    out << "    ";
    const auto& sel = b.selector;
    if (sel.environment) {
      out << "environments[" << quote(*sel.environment) << "]."
          << (sel.names.empty() ? std::string("all") : sel.names.front());
    } else if (sel.names.empty()) {
      out << "all";
    } else {
      out << "[";
      for (std::size_t i = 0; i < sel.names.size(); ++i) {
        out << (i ? ", " : "") << quote(sel.names[i]);
      }
      out << "]";
    }
    out << " " << describe(b.option) << "\n";
  }
  if (open) {
    out << "  }\n";
  }
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Resolution

namespace {

// Higher is more specific.
int specificity(const ComponentSelector& sel) {
  if (!sel.names.empty()) return 2;
  if (sel.environment) return 1;
  return 0;
}

bool matches(const ComponentSelector& sel, const Component& c) {
  if (sel.kind != c.kind) {
    return false;
  }
  if (sel.environment && sel.environment != c.environment) {
    return false;
  }
  return sel.names.empty() ||
         std::find(sel.names.begin(), sel.names.end(), c.name) != sel.names.end();
}

}  // namespace

BindingResolution resolve_bindings(const DeploymentManifest& manifest,
                                   const ApplicationModel& app) {
  for (const auto& b : manifest.bindings) {
    for (const auto& name : b.selector.names) {
      if (!app.find({b.selector.kind, name})) {
        throw BrokerError(ErrorCode::UnknownComponent, ComponentId{b.selector.kind, name}.key());
      }
    }
  }

  BindingResolution out;
  for (const auto& c : app.components) {
    const ComponentBinding* best = nullptr;
    for (const auto& b : manifest.bindings) {
      if (!matches(b.selector, c)) {
        continue;
      }
      // Strictly greater keeps the earliest binding among equals.
      if (!best || specificity(b.selector) > specificity(best->selector)) {
        best = &b;
      }
    }
    if (!best) {
      throw BrokerError(ErrorCode::UnboundComponent, c.id().key());
    }
    out.emplace(c.id(), best->option);
  }
  return out;
}

}  // namespace cloudbroker
