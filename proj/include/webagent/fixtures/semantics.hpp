#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "webagent/fixtures/dom.hpp"
#include "webagent/fixtures/layout.hpp"
#include "webagent/som.hpp"

namespace webagent::fixtures {

/// Protocol node id of a DOM node; shared by the DOM, accessibility and
/// backend id spaces of the fixture browser. 0 is never a valid id.
inline int node_id(const Node* n) { return n->index + 1; }

using UrlResolver = std::function<std::string(const std::string&)>;

std::string ax_role(const Node* element);
/// Accessible name: aria-label, then the role's own source (alt, label,
/// placeholder, content).
std::string ax_name(const Document& doc, const Node* element);

/// Accessibility.getFullAXTree result ({"nodes": [...]}) for the page.
nlohmann::json accessibility_tree(const Document& doc, const Node* focused, const UrlResolver& resolve);

/// Elements that receive a mark: links, buttons, form controls, summary,
/// interactive ARIA roles, onclick handlers, tabindex >= 0, and images.
bool is_interactable(const Node* element);

/// Unique selector for an element: "#id" when the id is unique, otherwise a
/// child-combinator path of tag:nth-child(k) steps from html.
std::string unique_selector(const Document& doc, const Node* element);

/// Marks every rendered interactable element that intersects `viewport`
/// (page coordinates) and whose centre is not covered by another element.
/// Uncovered visible text outside marks becomes static text, merged per
/// block between consecutive marks.
SomManifest compute_som(const Document& doc, const Layout& layout, const Rect& viewport,
                        const std::string& page_url);

}  // namespace webagent::fixtures
