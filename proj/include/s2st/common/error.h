// Copyright 2026 The s2st Authors.
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

#ifndef S2ST_COMMON_ERROR_H_
#define S2ST_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace s2st {

enum class ErrorCode {
  kInvalidArgument,
  kShape,
  kNumeric,
  kContract,
  kConfig,
  kParse,
  kIo,
  kIntegrity,
  kVocab,
  kOov,
  kDeterminism,
  kDegenerateBatch,
  kClient,
  kUndefined,
  kFingerprint,
};

std::string_view ErrorCodeName(ErrorCode code);

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

#define S2ST_DEFINE_ERROR(Name, Code)                                   \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& message) : Error(Code, message) {} \
  };

S2ST_DEFINE_ERROR(InvalidArgumentError, ErrorCode::kInvalidArgument)
S2ST_DEFINE_ERROR(ShapeError, ErrorCode::kShape)
S2ST_DEFINE_ERROR(NumericError, ErrorCode::kNumeric)
S2ST_DEFINE_ERROR(ContractError, ErrorCode::kContract)
S2ST_DEFINE_ERROR(ConfigError, ErrorCode::kConfig)
S2ST_DEFINE_ERROR(ParseError, ErrorCode::kParse)
S2ST_DEFINE_ERROR(IoError, ErrorCode::kIo)
S2ST_DEFINE_ERROR(IntegrityError, ErrorCode::kIntegrity)
S2ST_DEFINE_ERROR(VocabError, ErrorCode::kVocab)
S2ST_DEFINE_ERROR(OovError, ErrorCode::kOov)
S2ST_DEFINE_ERROR(DeterminismError, ErrorCode::kDeterminism)
S2ST_DEFINE_ERROR(DegenerateBatchError, ErrorCode::kDegenerateBatch)
S2ST_DEFINE_ERROR(ClientError, ErrorCode::kClient)
S2ST_DEFINE_ERROR(UndefinedError, ErrorCode::kUndefined)
S2ST_DEFINE_ERROR(FingerprintError, ErrorCode::kFingerprint)

#undef S2ST_DEFINE_ERROR

}  // namespace s2st

#endif  // S2ST_COMMON_ERROR_H_
