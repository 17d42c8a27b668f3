#ifndef UIDTHAT_COMMON_CSV_H_
#define UIDTHAT_COMMON_CSV_H_

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uidthat::csv {

// RFC 4180 quoting: fields containing a comma, quote or newline are quoted.
std::string EscapeField(std::string_view field);
void WriteRow(std::ostream& out, std::span<const std::string> fields);

// Reads one record, which may span lines when a quoted field holds a
// newline. Returns false at end of input. Throws DataError on an
// unterminated quote.
bool ReadRow(std::istream& in, std::vector<std::string>& fields);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double value);
// Throws DataError naming `what` if text is not a complete number.
double ParseDouble(std::string_view text, std::string_view what);
long ParseInt(std::string_view text, std::string_view what);

}  // namespace uidthat::csv

#endif  // UIDTHAT_COMMON_CSV_H_
