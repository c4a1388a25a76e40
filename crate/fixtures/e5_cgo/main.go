package main

/*
#include <stdio.h>

static void hello(void) {
	printf("hello from C\n");
}
*/
import "C"

import "fmt"

func main() {
	fmt.Println("calling into C")
	C.hello()
}
