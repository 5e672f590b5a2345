#include "pstyle/lexicon.hpp"

namespace pstyle {

// Small Dutch stand-in for the licensed dictionary. Category names follow the
// conventional dictionary naming; word lists are hand-picked and short.
std::string_view toy_category_lexicon_text() {
  static constexpr std::string_view kText = R"(%
1	pronoun
2	ppron
3	i
4	shehe
5	they
6	social
7	family
8	affiliation
9	home
10	body
11	sad
12	affect
13	feel
14	percept
15	hear
16	focuspast
17	focuspresent
18	focusfuture
19	verb
20	motion
21	male
22	tentat
23	cause
24	cogproc
25	insight
26	achieve
27	adverb
28	filler
29	death
%
ik	1,2,3
mij	1,2,3
me	1,2,3
mijn	1,2,3
jij	1,2
je	1,2
jou	1,2
hij	1,2,4,21
hem	1,2,4,21
zij	1,2,4,5
ze	1,2,4,5
haar	1,2,4
wij	1,2,8
we	1,2,8
ons	1,2,8
onze	1,2,8
hun	1,2,5
hen	1,2,5
zich	1,2
dat	1
die	1
dit	1
iets	1
niets	1
vriend*	6,8
praten	6,19
gesprek*	6
samen	6,8
familie	6,7
moeder	6,7
vader	6,7,21
ouders	6,7
partner	6,8
man	6,21
vrouw	6
zus	6,7
broer	6,7,21
zoon	6,7,21
dochter	6,7
kinderen	6,7
mensen	6
gezin	7,9
huis	9
thuis	9
keuken	9
kamer	9
tuin	9
woning	9
hoofd	10
hart	10
handen	10
lichaam	10
buik	10
moe	10
slapen	10
verdriet*	11,12
huilen	11,12
triest	11,12
alleen	11
eenzaam	11,12
gemis	11,12
verlies	11
blij	12
boos	12
bang	12
gelukkig	12
voel*	12,13,14
gevoel*	12,13
zien	14,19
zag	14,16,19
kijken	14,19
horen	14,15,19
hoorde	14,15,16,19
luisteren	14,15,19
zeggen	15,19
zei	15,16,19
gezegd	15,16
was	16,19
waren	16,19
had	16,19
hadden	16,19
vroeger	16
gisteren	16
ging	16,19,20
is	17,19
ben	17,19
zijn	17,19
nu	17
vandaag	17
heb	17,19
doe	17,19
zal	18,19
zullen	18,19
zou	18,19
morgen	18
straks	18
later	18
plan*	18
toekomst	18
ga	17,19,20
gaan	19,20
lopen	19,20
rijden	19,20
reizen	19,20
komen	19,20
kwam	16,19,20
wil	19
moet	19,26
meneer	21
misschien	22,24
eventueel	22,24
wellicht	22,24
soms	22
ergens	22
twijfel*	22,24
mogelijk	22
omdat	23,24
want	23,24
daardoor	23,24
waarom	23,24
oorzaak	23,24
reden	23,24
gevolg	23
denk*	19,24,25
weet	24,25
begrijp*	24,25
besef*	24,25
inzicht	25
werk*	26
prestatie*	26
doel*	26
succes	26
winnen	26
falen	26
wel	27
ook	27
heel	27
zeer	27
echt	27
gewoon	27
nog	27
al	27
uh	28
eh	28
hm	28
pff	28
nou	28
dood	29
sterven	29
overleden	29
begrafenis	29
graf	29
)";
  return kText;
}

std::string_view toy_sentiment_lexicon_text() {
  static constexpr std::string_view kText =
      "# token\tpolarity\tsubjectivity\n"
      "goed\t0.7\t0.6\n"
      "blij\t0.8\t1.0\n"
      "gelukkig\t0.8\t0.9\n"
      "fijn\t0.6\t0.8\n"
      "mooi\t0.7\t0.9\n"
      "leuk\t0.6\t0.8\n"
      "prettig\t0.5\t0.7\n"
      "geweldig\t0.9\t1.0\n"
      "beter\t0.5\t0.5\n"
      "rustig\t0.3\t0.5\n"
      "slecht\t-0.7\t0.7\n"
      "triest\t-0.6\t0.8\n"
      "verdriet\t-0.7\t0.8\n"
      "boos\t-0.6\t0.9\n"
      "bang\t-0.5\t0.8\n"
      "moeilijk\t-0.4\t0.6\n"
      "zwaar\t-0.4\t0.5\n"
      "erg\t-0.5\t0.6\n"
      "eenzaam\t-0.6\t0.8\n"
      "moe\t-0.3\t0.4\n"
      "vreselijk\t-0.9\t1.0\n"
      "dood\t-0.5\t0.3\n"
      "normaal\t0.0\t0.2\n";
  return kText;
}

}  // namespace pstyle
