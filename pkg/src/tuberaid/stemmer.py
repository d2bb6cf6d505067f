"""Porter suffix-stripping stemmer.

Implements the classic Porter (1980) algorithm, matching the behaviour of
the author's reference ANSI C implementation (including its two small
published rule adjustments: ``bli -> ble`` and ``logi -> log`` in step 2).
Words of length one or two are returned unchanged.
"""

STEMMER_VERSION = "porter/1980-c"

_VOWELS = "aeiou"


class _Buffer:
    """Mutable word buffer with the measure/condition helpers of the algorithm.

    Indices follow the reference implementation: the word is ``b[0..k]``
    inclusive, and ``j`` marks the end of the stem after a suffix match.
    """

    def __init__(self, word):
        self.b = word
        self.k = len(word) - 1
        self.j = 0

    def cons(self, i):
        ch = self.b[i]
        if ch in _VOWELS:
            return False
        if ch == "y":
            return True if i == 0 else not self.cons(i - 1)
        return True

    def m(self):
        # Number of VC sequences in b[0..j].
        n = 0
        i = 0
        while True:
            if i > self.j:
                return n
            if not self.cons(i):
                break
            i += 1
        i += 1
        while True:
            while True:
                if i > self.j:
                    return n
                if self.cons(i):
                    break
                i += 1
            i += 1
            n += 1
            while True:
                if i > self.j:
                    return n
                if not self.cons(i):
                    break
                i += 1
            i += 1

    def vowel_in_stem(self):
        return any(not self.cons(i) for i in range(self.j + 1))

    def double_cons(self, j):
        if j < 1 or self.b[j] != self.b[j - 1]:
            return False
        return self.cons(j)

    def cvc(self, i):
        # consonant-vowel-consonant ending, last consonant not w, x or y
        if i < 2 or not self.cons(i) or self.cons(i - 1) or not self.cons(i - 2):
            return False
        return self.b[i] not in "wxy"

    def ends(self, s):
        length = len(s)
        if length > self.k + 1 or not self.b[: self.k + 1].endswith(s):
            return False
        self.j = self.k - length
        return True

    def set_to(self, s):
        self.b = self.b[: self.j + 1] + s + self.b[self.j + 1 + len(s) :]
        self.k = self.j + len(s)

    def replace_if_m(self, s):
        if self.m() > 0:
            self.set_to(s)


def _step1ab(w):
    if w.b[w.k] == "s":
        if w.ends("sses"):
            w.k -= 2
        elif w.ends("ies"):
            w.set_to("i")
        elif w.b[w.k - 1] != "s":
            w.k -= 1
    if w.ends("eed"):
        if w.m() > 0:
            w.k -= 1
    elif (w.ends("ed") or w.ends("ing")) and w.vowel_in_stem():
        w.k = w.j
        if w.ends("at"):
            w.set_to("ate")
        elif w.ends("bl"):
            w.set_to("ble")
        elif w.ends("iz"):
            w.set_to("ize")
        elif w.double_cons(w.k):
            w.k -= 1
            if w.b[w.k] in "lsz":
                w.k += 1
        elif w.m() == 1 and w.cvc(w.k):
            w.set_to("e")


def _step1c(w):
    if w.ends("y") and w.vowel_in_stem():
        w.b = w.b[: w.k] + "i" + w.b[w.k + 1 :]


_STEP2_RULES = {
    "a": (("ational", "ate"), ("tional", "tion")),
    "c": (("enci", "ence"), ("anci", "ance")),
    "e": (("izer", "ize"),),
    "l": (("bli", "ble"), ("alli", "al"), ("entli", "ent"), ("eli", "e"),
          ("ousli", "ous")),
    "o": (("ization", "ize"), ("ation", "ate"), ("ator", "ate")),
    "s": (("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
          ("ousness", "ous")),
    "t": (("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")),
    "g": (("logi", "log"),),
}

_STEP3_RULES = {
    "e": (("icate", "ic"), ("ative", ""), ("alize", "al")),
    "i": (("iciti", "ic"),),
    "l": (("ical", "ic"), ("ful", "")),
    "s": (("ness", ""),),
}


def _apply_rules(w, rules, key):
    for suffix, replacement in rules.get(key, ()):
        if w.ends(suffix):
            w.replace_if_m(replacement)
            return


_STEP4_SUFFIXES = {
    "a": ("al",),
    "c": ("ance", "ence"),
    "e": ("er",),
    "i": ("ic",),
    "l": ("able", "ible"),
    "n": ("ant", "ement", "ment", "ent"),
    "s": ("ism",),
    "t": ("ate", "iti"),
    "u": ("ous",),
    "v": ("ive",),
    "z": ("ize",),
}


def _step4(w):
    key = w.b[w.k - 1]
    if key == "o":
        if not ((w.ends("ion") and w.b[w.j] in "st") or w.ends("ou")):
            return
    elif key in _STEP4_SUFFIXES:
        if not any(w.ends(s) for s in _STEP4_SUFFIXES[key]):
            return
    else:
        return
    if w.m() > 1:
        w.k = w.j


def _step5(w):
    w.j = w.k
    if w.b[w.k] == "e":
        a = w.m()
        if a > 1 or (a == 1 and not w.cvc(w.k - 1)):
            w.k -= 1
    if w.b[w.k] == "l" and w.double_cons(w.k) and w.m() > 1:
        w.k -= 1


def stem(word):
    """Return the Porter stem of a lowercase word."""
    if len(word) <= 2:
        return word
    w = _Buffer(word)
    _step1ab(w)
    _step1c(w)
    _apply_rules(w, _STEP2_RULES, w.b[w.k - 1])
    _apply_rules(w, _STEP3_RULES, w.b[w.k])
    _step4(w)
    _step5(w)
    return w.b[: w.k + 1]
