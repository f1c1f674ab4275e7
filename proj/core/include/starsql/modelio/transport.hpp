#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace starsql::modelio {

struct HttpResponse {
    int status = 0;  // 0: no response (connection failure)
    std::string body;
    std::string error;
};

// One POST of a JSON body. Implementations must be safe for concurrent use.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse post(const std::string& path, const std::string& body,
                              const std::map<std::string, std::string>& headers) = 0;
};

class HttpTransport : public Transport {
public:
    HttpTransport(std::string base_url, std::chrono::milliseconds timeout);
    HttpResponse post(const std::string& path, const std::string& body,
                      const std::map<std::string, std::string>& headers) override;

private:
    std::string base_url_;
    std::chrono::milliseconds timeout_;
};

}  // namespace starsql::modelio
