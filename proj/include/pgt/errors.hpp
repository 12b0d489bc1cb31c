#ifndef PGT_ERRORS_HPP
#define PGT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pgt {

// Raised when a brute-force verification or enumeration would exceed its
// configured work budget.
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a problem instance is too large for an exact method
// (e.g. Huffman over 2^n symbols with n > 20).
class SizeError : public std::runtime_error {
public:
    explicit SizeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pgt

#endif
