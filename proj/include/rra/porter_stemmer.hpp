#pragma once

#include <string>
#include <string_view>

namespace rra {

/// Porter (1980) suffix-stripping stemmer for lowercase ASCII words.
/// Words of length <= 2 and words containing non-letters are returned as-is.
class PorterStemmer {
public:
    [[nodiscard]] std::string operator()(std::string_view word) const {
        if (word.size() <= 2) {
            return std::string(word);
        }
        for (char c : word) {
            if (c < 'a' || c > 'z') {
                return std::string(word);
            }
        }
        State s{std::string(word)};
        s.step1ab();
        s.step1c();
        s.step2();
        s.step3();
        s.step4();
        s.step5();
        return s.b;
    }

private:
    struct State {
        std::string b;
        // Stem end (exclusive) after a successful ends() match.
        std::size_t j = 0;

        bool cons(std::size_t i) const {
            switch (b[i]) {
            case 'a':
            case 'e':
            case 'i':
            case 'o':
            case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !cons(i - 1);
            default:
                return true;
            }
        }

        // Number of VC sequences in b[0, j).
        int measure() const {
            int n = 0;
            std::size_t i = 0;
            while (true) {
                if (i >= j) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
            while (true) {
                while (true) {
                    if (i >= j) return n;
                    if (cons(i)) break;
                    ++i;
                }
                ++i;
                ++n;
                while (true) {
                    if (i >= j) return n;
                    if (!cons(i)) break;
                    ++i;
                }
                ++i;
            }
        }

        bool vowel_in_stem() const {
            for (std::size_t i = 0; i < j; ++i) {
                if (!cons(i)) return true;
            }
            return false;
        }

        bool double_cons(std::size_t end) const {
            return end >= 2 && b[end - 1] == b[end - 2] && cons(end - 1);
        }

        // cvc at position ending at `end` (exclusive), last c not w, x or y.
        bool cvc(std::size_t end) const {
            if (end < 3 || !cons(end - 1) || cons(end - 2) || !cons(end - 3)) return false;
            const char ch = b[end - 1];
            return ch != 'w' && ch != 'x' && ch != 'y';
        }

        bool ends(std::string_view suffix) {
            if (suffix.size() > b.size() || b.compare(b.size() - suffix.size(), suffix.size(), suffix) != 0) {
                return false;
            }
            j = b.size() - suffix.size();
            return true;
        }

        void set_to(std::string_view s) { b.replace(j, b.size() - j, s); }

        void replace_if_measured(std::string_view s) {
            if (measure() > 0) set_to(s);
        }

        void step1ab() {
            if (b.back() == 's') {
                if (ends("sses")) {
                    b.resize(b.size() - 2);
                } else if (ends("ies")) {
                    set_to("i");
                } else if (b.size() >= 2 && b[b.size() - 2] != 's') {
                    b.pop_back();
                }
            }
            if (ends("eed")) {
                if (measure() > 0) b.pop_back();
            } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
                b.resize(j);
                if (ends("at")) {
                    set_to("ate");
                } else if (ends("bl")) {
                    set_to("ble");
                } else if (ends("iz")) {
                    set_to("ize");
                } else if (double_cons(b.size())) {
                    const char ch = b.back();
                    if (ch != 'l' && ch != 's' && ch != 'z') b.pop_back();
                } else {
                    j = b.size();
                    if (measure() == 1 && cvc(b.size())) b.push_back('e');
                }
            }
        }

        void step1c() {
            if (ends("y") && vowel_in_stem()) b.back() = 'i';
        }

        void step2() {
            if (b.size() < 2) return;
            switch (b[b.size() - 2]) {
            case 'a':
                if (ends("ational")) { replace_if_measured("ate"); break; }
                if (ends("tional")) { replace_if_measured("tion"); break; }
                break;
            case 'c':
                if (ends("enci")) { replace_if_measured("ence"); break; }
                if (ends("anci")) { replace_if_measured("ance"); break; }
                break;
            case 'e':
                if (ends("izer")) { replace_if_measured("ize"); break; }
                break;
            case 'l':
                if (ends("bli")) { replace_if_measured("ble"); break; }
                if (ends("alli")) { replace_if_measured("al"); break; }
                if (ends("entli")) { replace_if_measured("ent"); break; }
                if (ends("eli")) { replace_if_measured("e"); break; }
                if (ends("ousli")) { replace_if_measured("ous"); break; }
                break;
            case 'o':
                if (ends("ization")) { replace_if_measured("ize"); break; }
                if (ends("ation")) { replace_if_measured("ate"); break; }
                if (ends("ator")) { replace_if_measured("ate"); break; }
                break;
            case 's':
                if (ends("alism")) { replace_if_measured("al"); break; }
                if (ends("iveness")) { replace_if_measured("ive"); break; }
                if (ends("fulness")) { replace_if_measured("ful"); break; }
                if (ends("ousness")) { replace_if_measured("ous"); break; }
                break;
            case 't':
                if (ends("aliti")) { replace_if_measured("al"); break; }
                if (ends("iviti")) { replace_if_measured("ive"); break; }
                if (ends("biliti")) { replace_if_measured("ble"); break; }
                break;
            case 'g':
                if (ends("logi")) { replace_if_measured("log"); break; }
                break;
            default:
                break;
            }
        }

        void step3() {
            switch (b.back()) {
            case 'e':
                if (ends("icate")) { replace_if_measured("ic"); break; }
                if (ends("ative")) { replace_if_measured(""); break; }
                if (ends("alize")) { replace_if_measured("al"); break; }
                break;
            case 'i':
                if (ends("iciti")) { replace_if_measured("ic"); break; }
                break;
            case 'l':
                if (ends("ical")) { replace_if_measured("ic"); break; }
                if (ends("ful")) { replace_if_measured(""); break; }
                break;
            case 's':
                if (ends("ness")) { replace_if_measured(""); break; }
                break;
            default:
                break;
            }
        }

        void step4() {
            if (b.size() < 2) return;
            bool matched = false;
            switch (b[b.size() - 2]) {
            case 'a': matched = ends("al"); break;
            case 'c': matched = ends("ance") || ends("ence"); break;
            case 'e': matched = ends("er"); break;
            case 'i': matched = ends("ic"); break;
            case 'l': matched = ends("able") || ends("ible"); break;
            case 'n': matched = ends("ant") || ends("ement") || ends("ment") || ends("ent"); break;
            case 'o':
                if (ends("ion")) {
                    matched = j > 0 && (b[j - 1] == 's' || b[j - 1] == 't');
                } else {
                    matched = ends("ou");
                }
                break;
            case 's': matched = ends("ism"); break;
            case 't': matched = ends("ate") || ends("iti"); break;
            case 'u': matched = ends("ous"); break;
            case 'v': matched = ends("ive"); break;
            case 'z': matched = ends("ize"); break;
            default: break;
            }
            if (matched && measure() > 1) b.resize(j);
        }

        void step5() {
            j = b.size();
            if (b.back() == 'e') {
                j = b.size() - 1;
                const int m = measure();
                if (m > 1 || (m == 1 && !cvc(b.size() - 1))) b.pop_back();
            }
            j = b.size();
            if (b.back() == 'l' && double_cons(b.size()) && measure() > 1) b.pop_back();
        }
    };
};

} // namespace rra
