#pragma once

// Thin strict reader over the RapidXML parser bundled with Boost.PropertyTree.

#include <boost/property_tree/detail/rapidxml.hpp>

#include <charconv>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pathbench/errors.hpp"

namespace pathbench::xml {

namespace rx = boost::property_tree::detail::rapidxml;
using Node = rx::xml_node<char>;

class Document {
public:
    explicit Document(std::string_view text) : original_(text), buffer_(text.begin(), text.end()) {
        buffer_.push_back('\0');
        try {
            doc_.parse<rx::parse_default>(buffer_.data());
        } catch (const rx::parse_error& e) {
            auto [line, col] = position_of(e.where<char>());
            throw SyntaxError(e.what(), line, col);
        }
    }

    Document(const Document&) = delete;
    Document& operator=(const Document&) = delete;

    const Node& root(std::string_view expected) const {
        const Node* first = nullptr;
        for (const Node* n = doc_.first_node(); n != nullptr; n = n->next_sibling()) {
            if (n->type() != rx::node_element) continue;
            if (first != nullptr) fail(*n, "more than one root element");
            first = n;
        }
        if (first == nullptr) throw SyntaxError("document has no root element", 1, 1);
        if (name(*first) != expected) {
            fail(*first, "expected root element <" + std::string(expected) + ">");
        }
        return *first;
    }

    std::pair<std::size_t, std::size_t> position_of(const char* p) const {
        std::size_t line = 1;
        std::size_t col = 1;
        if (p == nullptr || p < buffer_.data() || p > buffer_.data() + buffer_.size()) return {line, col};
        // rapidxml rewrites the buffer in place; count on the untouched copy.
        const auto offset = static_cast<std::size_t>(p - buffer_.data());
        for (std::size_t i = 0; i < offset && i < original_.size(); ++i) {
            if (original_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {line, col};
    }

    [[noreturn]] void fail(const Node& node, const std::string& message) const {
        // name() points just past '<'.
        auto [line, col] = position_of(node.name());
        throw SyntaxError(message, line, col > 1 ? col - 1 : col);
    }

    static std::string_view name(const Node& node) { return {node.name(), node.name_size()}; }

    static std::string_view text(const Node& node) {
        std::string_view v(node.value(), node.value_size());
        const auto first = v.find_first_not_of(" \t\r\n");
        if (first == std::string_view::npos) return {};
        const auto last = v.find_last_not_of(" \t\r\n");
        return v.substr(first, last - first + 1);
    }

    std::vector<const Node*> children(const Node& node) const {
        std::vector<const Node*> out;
        for (const Node* c = node.first_node(); c != nullptr; c = c->next_sibling()) {
            if (c->type() == rx::node_element) out.push_back(c);
        }
        return out;
    }

    void check_attributes(const Node& node, std::initializer_list<std::string_view> allowed) const {
        for (const auto* a = node.first_attribute(); a != nullptr; a = a->next_attribute()) {
            std::string_view an(a->name(), a->name_size());
            bool ok = false;
            for (auto allowed_name : allowed) ok = ok || allowed_name == an;
            if (!ok) fail(node, "unknown attribute '" + std::string(an) + "' on <" + std::string(name(node)) + ">");
        }
    }

    void check_no_children(const Node& node) const {
        auto kids = children(node);
        if (!kids.empty()) fail(*kids.front(), "unexpected element <" + std::string(name(*kids.front())) + ">");
    }

    static std::optional<std::string_view> attribute(const Node& node, std::string_view attr) {
        const auto* a = node.first_attribute(attr.data(), attr.size());
        if (a == nullptr) return std::nullopt;
        return std::string_view(a->value(), a->value_size());
    }

    std::string_view required(const Node& node, std::string_view attr) const {
        auto v = attribute(node, attr);
        if (!v) fail(node, "missing attribute '" + std::string(attr) + "' on <" + std::string(name(node)) + ">");
        return *v;
    }

    template <class T>
    T parse_number(const Node& node, std::string_view attr, std::string_view raw) const {
        T value{};
        const char* end = raw.data() + raw.size();
        auto [ptr, ec] = std::from_chars(raw.data(), end, value);
        if (raw.empty() || ec != std::errc() || ptr != end) {
            fail(node, "attribute '" + std::string(attr) + "' is not a decimal number: '" + std::string(raw) + "'");
        }
        return value;
    }

    template <class T>
    T number(const Node& node, std::string_view attr) const {
        return parse_number<T>(node, attr, required(node, attr));
    }

    template <class T>
    std::optional<T> optional_number(const Node& node, std::string_view attr) const {
        auto raw = attribute(node, attr);
        if (!raw) return std::nullopt;
        return parse_number<T>(node, attr, *raw);
    }

private:
    std::string original_;
    std::vector<char> buffer_;
    rx::xml_document<char> doc_;
};

std::string escape(std::string_view raw);

}  // namespace pathbench::xml
