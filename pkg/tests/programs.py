"""Example clause sets used across the test suite."""

SUM_UPTO = """
false :- M>Sum, M>=0, sum_upto(M,Sum).
sum_upto(X,R) :- R0=0, while(X,R0,R).
while(X1,R1,R) :- X1>0, R2=R1+X1, X2=X1-1, while(X2,R2,R).
while(X1,R1,R) :- X1=<0, R=R1.
"""

SUM_UPTO_MODEL = {
    "while": "R>=R1, R>=X1+R1",
    "sum_upto": "R>=X, R>=0",
}

# list-free analogue of the specialisation example: the list [0] becomes
# the pair of integer arguments (0, 0); q is left undefined
SPEC_LISTS = """
:- mode(int).
false :- X=0, p(X,0,0).
p(X,N,T) :- X=Y+1, p(Y,N,T).
p(X,N,T) :- X>N.
p(X,N,T) :- N>0, q(X,T).
"""

SPEC_LISTS_EXPECTED = """
false :- X=0, sp(X).
sp(X) :- X=Y+1, sp(Y).
sp(X) :- X>0.
"""

RAF_FAR = """
false :- X>0, q(X,Y).
q(X,Y) :- X<Y.
"""

QA_IN = """
false :- X=0, p(X).
p(X) :- X=1.
p(X) :- X>1, Y=X+1, p(Y).
"""

QA_EXPECTED = """
false :- X=0, p_a(X).
p_a(X) :- X=1, p_q(X).
p_a(X) :- X>1, Y=X+1, p_q(X), p_a(Y).
p_q(Y) :- X>1, Y=X+1, p_q(X).
p_q(X) :- X=0.
"""

PROP = """
false :- X=0, Y=0, p(X,Y,N).
p(X,Y,N) :- X>=N, X>Y.
p(X,Y,N) :- X<N, X1=X+1, Y1=X1+Y, p(X1,Y1,N).
"""

PROP_EXPECTED = """
false :- X=0, Y=0, sp(X,Y,N).
sp(X,Y,N) :- Y>=0, X>=N, X>Y.
sp(X,Y,N) :- X>=0, Y>=0, X<N, X1=X+1, Y1=X1+Y, sp(X1,Y1,N).
"""

PROP_MODEL = "sp(X,Y,N) :- X>=Y+1, Y>=0."

LEQ = """
false :- Z1>Z2, X1=X2, X2=<Y2, sur(X1,Z1), pr(X2,Y2,Z2).
sur(X,Z) :- f(X,Z).
f(N,Z) :- N=<0, Z=0.
f(N,Z) :- N>=1, N1=N-1, Z=R+N, f(N1,R).
pr(X,Y,Z) :- W=0, X=<Y, g(X,Y,W,Z).
g(N,P,R,R2) :- N=<0, N=<P, R>=0, R2=R.
g(N,P,R,R2) :- N>=1, N=<P, R>=0, N1=N-1, R1=P+R, g(N1,P,R1,R2).
"""

LEQ_PAIRED = """
false :- Z1>Z2, X1=<Y2, W=0, fg(X1,Z1,Y2,W,Z2).
fg(N,Z1,Y,W,Z2) :- N=<0, N=<Y, W>=0, Z1=0, Z2=W.
fg(N,Z1,Y,W,Z2) :- N>=1, N=<Y, W>=0, N1=N-1, Z1=R+N, M=Y+W, fg(N1,R,Y,M,Z2).
"""

LEQ_MODEL = "fg(X1,Z1,Y2,W,Z2) :- Z2-W>=Z1, Z1>=0, W>=0."

CFR_IN = """
main :- while(X,Y,M).
while(X,Y,M) :- X>0, Y<M, Y1=Y+1, while(X,Y1,M).
while(X,Y,M) :- X>0, Y>=M, X1=X-1, while(X1,Y,M).
while(X,Y,M) :- X=<0.
"""

SUM_UPTO_C = """
// pre: m >= 0
// post: sum >= m
// entry: sum = sum_upto(m);
int sum_upto(int x) {
  int r = 0;
  while (x > 0) {
    r = r + x;
    x = x - 1;
  }
  return r;
}
"""

REACH_EXPECTED = """
false :- M>=0, assign_error(M).
assign_error(M) :- X=M, Sum=0, while_error(X,M,Sum).
while_error(X,M,Sum) :- X=<0, M>Sum.
while_error(X,M,Sum) :- X>0, Sum1=Sum+X, X1=X-1, while_error(X1,M,Sum1).
"""

LEQ_C = """
// pre: x1 == x2 && x2 <= y2
// post: z1 <= z2
// entry: z1 = f(x1);
// entry: z2 = g(x2, y2);
int x1, z1, x2, y2, z2;

int f(int n1) {
  int r1;
  if (n1 <= 0) { r1 = 0; } else { r1 = f(n1 - 1) + n1; }
  return r1;
}

int g(int n2, int m2) {
  int r2 = 0;
  while (n2 > 0) {
    r2 += m2;
    n2--;
  }
  return r2;
}
"""
