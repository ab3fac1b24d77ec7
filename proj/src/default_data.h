// Copyright 2026 The propspan Authors.
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

#ifndef PROPSPAN_SRC_DEFAULT_DATA_H_
#define PROPSPAN_SRC_DEFAULT_DATA_H_

namespace propspan {

// Contents of data/techniques.txt and data/stopwords.txt, compiled in.
const char *DefaultTechniquesText();
const char *DefaultStopwordsText();

}  // namespace propspan

#endif  // PROPSPAN_SRC_DEFAULT_DATA_H_
