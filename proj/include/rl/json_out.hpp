#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace rl {

// Minimal JSON emitter. The link and report schemas require all numbers as
// decimals with at least 15 significant digits, which the usual
// shortest-round-trip printers do not guarantee, so numbers go out as %.17g.
class JsonWriter {
  public:
    std::string str() const { return out_; }

    JsonWriter& begin_object() { item(); out_ += '{'; stack_.push_back(0); return *this; }
    JsonWriter& end_object() { out_ += '}'; stack_.pop_back(); return *this; }
    JsonWriter& begin_array() { item(); out_ += '['; stack_.push_back(0); return *this; }
    JsonWriter& end_array() { out_ += ']'; stack_.pop_back(); return *this; }

    JsonWriter& key(const std::string& k) {
        item();
        quote(k);
        out_ += ':';
        pending_value_ = true;
        return *this;
    }

    JsonWriter& value(double v) {
        item();
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out_ += buf;
        return *this;
    }
    JsonWriter& value(int v) { return value((long long)v); }
    JsonWriter& value(std::size_t v) { return value((long long)v); }
    JsonWriter& value(long long v) {
        item();
        out_ += std::to_string(v);
        return *this;
    }
    JsonWriter& value(bool v) {
        item();
        out_ += v ? "true" : "false";
        return *this;
    }
    JsonWriter& value(const std::string& s) { item(); quote(s); return *this; }
    JsonWriter& value(const char* s) { item(); quote(s); return *this; }
    JsonWriter& null() { item(); out_ += "null"; return *this; }

    template <class T>
    JsonWriter& kv(const std::string& k, const T& v) { key(k); return value(v); }

  private:
    void item() {
        if (pending_value_) { pending_value_ = false; return; }
        if (!stack_.empty() && stack_.back()++ > 0) out_ += ',';
    }
    void quote(const std::string& s) {
        out_ += '"';
        for (char c : s) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                default: out_ += c;
            }
        }
        out_ += '"';
    }

    std::string out_;
    std::vector<int> stack_;
    bool pending_value_ = false;
};

}  // namespace rl
