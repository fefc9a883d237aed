#pragma once

// Thin RAII wrapper over expat in namespace-aware mode. Element and attribute
// names are delivered as "<namespace-uri> <local-name>", or just the local
// name when unqualified.

#include <expat.h>

#include <algorithm>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ontoalign/error.hpp"

namespace ontoalign::detail {

using XmlAttributes = std::vector<std::pair<std::string, std::string>>;

struct XmlHandlers {
  std::function<void(const std::string& name, const XmlAttributes& attrs)> start;
  std::function<void(const std::string& name)> end;
  std::function<void(std::string_view text)> text;
};

inline constexpr std::string_view kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfsNs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwlNs = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXmlNs = "http://www.w3.org/XML/1998/namespace";

/// Joins a namespace and local name the way expat reports qualified names.
inline std::string qname(std::string_view ns, std::string_view local) {
  std::string out(ns);
  out += ' ';
  out += local;
  return out;
}

/// Namespace URI concatenated with the local name, i.e. the term's IRI.
inline std::string name_to_iri(std::string_view name) {
  const auto space = name.find(' ');
  if (space == std::string_view::npos) return std::string(name);
  std::string out(name.substr(0, space));
  out += name.substr(space + 1);
  return out;
}

inline std::string_view local_name(std::string_view name) {
  const auto space = name.find(' ');
  return space == std::string_view::npos ? name : name.substr(space + 1);
}

inline const std::string* find_attr(const XmlAttributes& attrs, std::string_view name) {
  for (const auto& [key, value] : attrs) {
    if (key == name) return &value;
  }
  return nullptr;
}

class XmlReader {
 public:
  explicit XmlReader(XmlHandlers handlers) : handlers_(std::move(handlers)) {
    parser_ = XML_ParserCreateNS(nullptr, ' ');
    XML_SetUserData(parser_, this);
    XML_SetElementHandler(parser_, &XmlReader::on_start, &XmlReader::on_end);
    XML_SetCharacterDataHandler(parser_, &XmlReader::on_text);
  }
  ~XmlReader() { XML_ParserFree(parser_); }
  XmlReader(const XmlReader&) = delete;
  XmlReader& operator=(const XmlReader&) = delete;

  /// Feeds the whole document. Throws ParseError on malformed input.
  void parse(std::string_view document) {
    constexpr std::size_t kChunk = 1 << 20;
    std::size_t pos = 0;
    do {
      const std::size_t n = std::min(kChunk, document.size() - pos);
      const bool last = pos + n == document.size();
      if (XML_Parse(parser_, document.data() + pos, static_cast<int>(n), last) ==
          XML_STATUS_ERROR) {
        const auto offset = XML_GetCurrentByteIndex(parser_);
        throw ParseError(std::string("malformed XML: ") +
                             XML_ErrorString(XML_GetErrorCode(parser_)) + " at line " +
                             std::to_string(XML_GetCurrentLineNumber(parser_)),
                         offset < 0 ? 0 : static_cast<std::size_t>(offset));
      }
      pos += n;
    } while (pos < document.size());
  }

 private:
  static void on_start(void* self, const XML_Char* name, const XML_Char** atts) {
    auto* reader = static_cast<XmlReader*>(self);
    XmlAttributes attrs;
    for (int i = 0; atts[i] != nullptr; i += 2) attrs.emplace_back(atts[i], atts[i + 1]);
    if (reader->handlers_.start) reader->handlers_.start(name, attrs);
  }
  static void on_end(void* self, const XML_Char* name) {
    auto* reader = static_cast<XmlReader*>(self);
    if (reader->handlers_.end) reader->handlers_.end(name);
  }
  static void on_text(void* self, const XML_Char* s, int len) {
    auto* reader = static_cast<XmlReader*>(self);
    if (reader->handlers_.text) reader->handlers_.text(std::string_view(s, static_cast<std::size_t>(len)));
  }

  XML_Parser parser_;
  XmlHandlers handlers_;
};

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace ontoalign::detail
