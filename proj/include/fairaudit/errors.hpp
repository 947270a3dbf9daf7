#pragma once

#include <stdexcept>
#include <string>

namespace fairaudit {

// Error taxonomy. config_error covers user-supplied configuration
// (schemas, roles, parameters); data_error covers the data itself
// (parsing, alignment, empty or degenerate inputs). The CLI maps
// config_error to exit code 1, data_error to 2, anything else to 3.

class audit_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class config_error : public audit_error {
public:
    using audit_error::audit_error;
};

// An attribute name that does not exist in the schema.
class schema_error : public config_error {
public:
    using config_error::config_error;
};

// An attribute used in a position its role does not permit.
class role_error : public config_error {
public:
    using config_error::config_error;
};

class parameter_error : public config_error {
public:
    using config_error::config_error;
};

// A generator parameter combination that yields non-integer counts.
class integrality_error : public parameter_error {
public:
    using parameter_error::parameter_error;
};

class data_error : public audit_error {
public:
    using audit_error::audit_error;
};

class parse_error : public data_error {
public:
    using data_error::data_error;
};

class empty_input_error : public data_error {
public:
    using data_error::data_error;
};

class conversion_error : public data_error {
public:
    using data_error::data_error;
};

// Observed/predicted dataset pairs that do not line up row for row.
class alignment_error : public data_error {
public:
    using data_error::data_error;
};

// BCR needs at least one positive and one negative observed row.
class bcr_undefined_error : public data_error {
public:
    using data_error::data_error;
};

class io_error : public data_error {
public:
    using data_error::data_error;
};

} // namespace fairaudit
